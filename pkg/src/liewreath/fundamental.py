"""The coefficients t_n of G(T) = T e^T / (e^T - 1) and the fundamental
action d : B -> S(B), d_b(y) = Σ_n t_n (ad y)^n (b)."""
from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .action import FormalAction, make_action
from .lie import LieAlgebra, symbolic_ad_apply
from .polyjet import HomogeneousPoly, Jet
from .sampling import random_vector
from .spaces import ZERO, format_rational

DEFAULT_ORDER = 8


def _series_divide(num, den, n_terms):
    """Quotient of two power series given as coefficient lists; leading zeros
    common to both are cancelled first."""
    shift = 0
    while not den[shift]:
        if num[shift]:
            raise ZeroDivisionError("quotient is not a power series")
        shift += 1
    num, den = num[shift:], den[shift:]
    q = []
    for n in range(n_terms):
        acc = num[n] if n < len(num) else ZERO
        for k in range(max(0, n - len(den) + 1), n):
            acc -= q[k] * den[n - k]
        q.append(acc / den[0])
    return q


@lru_cache(maxsize=None)
def _t_table(N: int) -> tuple:
    # T e^T = Σ T^{m+1}/m!,  e^T - 1 = Σ_{m>=1} T^m/m!
    size = N + 2
    num = [ZERO] + [Fraction(1, factorial(m)) for m in range(size)]
    den = [ZERO] + [Fraction(1, factorial(m)) for m in range(1, size + 1)]
    return tuple(_series_divide(num, den, N + 1))


def t_coefficients(N: int) -> list:
    """[t_0, ..., t_N] by exact power-series division."""
    if N < 0:
        raise ValueError("N must be >= 0")
    return list(_t_table(N))


def t_by_recurrence(N: int) -> list:
    """[t_0, ..., t_N] from 1/m! = Σ_{n+r=m} t_r/(n+1)!, solved for t_m."""
    t = []
    for m in range(N + 1):
        acc = Fraction(1, factorial(m))
        for r in range(m):
            acc -= t[r] / factorial(m - r + 1)
        t.append(acc)
    return t


def t(n: int) -> Fraction:
    """t_n with the convention t_n = 0 for n < 0."""
    if n < 0:
        return ZERO
    return _t_table(max(n, 8))[n]


def format_t_table(values) -> str:
    return ", ".join(format_rational(v) for v in values)


# ---------------------------------------------------------------------------


def ad_powers(B: LieAlgebra, b, N: int) -> list:
    """[(ad y)^n (b) for n = 0..N] as homogeneous polynomials in y."""
    coords = B.element(b)
    mats = [a.matrix for a in B.ad_basis()]
    cur = HomogeneousPoly.constant(B.space, B.space, coords)
    out = [cur]
    for _ in range(N):
        cur = symbolic_ad_apply(B, mats, cur)
        out.append(cur)
    return out


def fundamental_jet(B: LieAlgebra, b, N: int = DEFAULT_ORDER) -> Jet:
    """d_b truncated at order N; flagged polynomial when (ad y)^n b vanishes within N."""
    powers = ad_powers(B, b, N)
    comps = [p.scale(t(n)) for n, p in enumerate(powers)]
    exact = any(p.is_zero() for p in powers)
    return Jet(B.space, B.space, comps, N, polynomial=exact)


def fundamental_action(B: LieAlgebra, N: int = DEFAULT_ORDER, check: bool = True) -> FormalAction:
    if N < 0:
        raise ValueError("N must be >= 0")
    images = [fundamental_jet(B, B.element(lab), N) for lab in B.labels]
    return make_action(B, B.space, images, N, check=check)


def nilpotent_fundamental_jet(B: LieAlgebra, b, N: int) -> Jet:
    """b + ½[y,b] + (1/12)[y,[y,b]], valid when (ad y)^3 = 0 for all y."""
    powers = ad_powers(B, b, 2)
    comps = [powers[0], powers[1].scale(Fraction(1, 2)), powers[2].scale(Fraction(1, 12))]
    comps += [HomogeneousPoly.zero(B.space, B.space, m) for m in range(3, N + 1)]
    return Jet(B.space, B.space, comps[: max(N, 2) + 1], polynomial=True)


# ---------------------------------------------------------------------------
# combinatorial and derivation identities


def _bivariate_mul(p, q, D):
    out = {}
    for (i1, j1), c1 in p.items():
        for (i2, j2), c2 in q.items():
            if i1 + i2 + j1 + j2 <= D:
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, ZERO) + c1 * c2
    return {k: v for k, v in out.items() if v}


def _clean(p):
    return {k: v for k, v in p.items() if v}


def check_generating_identity(max_deg: int):
    """G(x+y) = L(x,y) + L(y,x) with L(x,y) = (G(x+y) - G(y))/x · G(x), up to total degree max_deg.

    Returns None on success, else the first differing monomial."""
    tt = t_coefficients(max_deg + 1)
    G_sum = {}
    for n in range(max_deg + 2):
        for k in range(n + 1):
            G_sum[(k, n - k)] = G_sum.get((k, n - k), ZERO) + tt[n] * comb(n, k)
    # (G(x+y) - G(y)) / x: drop the x-free part, lower x-degree by one
    quot = _clean({(i - 1, j): c for (i, j), c in G_sum.items() if i >= 1 and i - 1 + j <= max_deg})
    Gx = {(n, 0): tt[n] for n in range(max_deg + 1) if tt[n]}
    L = _bivariate_mul(quot, Gx, max_deg)
    L_swapped = {(j, i): c for (i, j), c in L.items()}
    rhs = dict(L)
    for k, c in L_swapped.items():
        rhs[k] = rhs.get(k, ZERO) + c
    rhs = _clean(rhs)
    lhs = _clean({k: c for k, c in G_sum.items() if sum(k) <= max_deg})
    for key in sorted(set(lhs) | set(rhs)):
        if lhs.get(key, ZERO) != rhs.get(key, ZERO):
            return key, lhs.get(key, ZERO), rhs.get(key, ZERO)
    return None


def check_t_recurrence(m: int) -> bool:
    return Fraction(1, factorial(m)) == sum((t(r) / factorial(m - r + 1) for r in range(m + 1)), ZERO)


def check_binomial_t_identity(m: int, p: int) -> bool:
    q = m - p
    lhs = comb(m, p) * t(m)
    rhs = ZERO
    for n in range(m + 2):
        r = m + 1 - n
        if p <= n - 1:
            rhs += comb(n, p) * t(n) * t(r)
        if q <= r - 1:
            rhs += comb(r, q) * t(n) * t(r)
    return lhs == rhs


def _matvec(M, v):
    return tuple(sum((a * b for a, b in zip(row, v) if a and b), ZERO) for row in M)


def _power_apply(M, v, k):
    for _ in range(k):
        v = _matvec(M, v)
    return v


def _vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _vscale(c, a):
    return tuple(c * x for x in a)


def leibniz_identities(L: LieAlgebra, D, a, b, m: int) -> tuple:
    """Both sides of the two higher Leibniz identities for a derivation D (a matrix).

    Returns ((lhs1, rhs1), (lhs2, rhs2))."""
    n = L.dim
    z = (ZERO,) * n
    P = lambda v, k: _power_apply(D, v, k)
    lhs1 = z
    lhs2 = z
    for k in range(m + 1):
        t1 = P(L.bracket(a, P(b, m - k)), k)
        lhs1 = _vadd(lhs1, t1)
        lhs2 = _vadd(lhs2, _vadd(t1, P(L.bracket(P(a, m - k), b), k)))
    rhs1 = z
    rhs2 = z
    for i in range(m + 1):
        br = L.bracket(P(a, i), P(b, m - i))
        rhs1 = _vadd(rhs1, _vscale(comb(m + 1, i + 1), br))
        rhs2 = _vadd(rhs2, _vscale(comb(m + 2, i + 1), br))
    return (lhs1, rhs1), (lhs2, rhs2)


def derivation_t_identity(L: LieAlgebra, D, a, b, m: int) -> tuple:
    """(t_m D^m[a,b], Σ_{n+r=m+1} t_n t_r (Σ_k D^k[D^n a, D^{r-k-1} b] + Σ_k D^k[D^{n-k-1} a, D^r b]))."""
    P = lambda v, k: _power_apply(D, v, k)
    lhs = _vscale(t(m), P(L.bracket(a, b), m))
    rhs = (ZERO,) * L.dim
    for n in range(m + 2):
        r = m + 1 - n
        w = t(n) * t(r)
        if not w:
            continue
        inner = (ZERO,) * L.dim
        for k in range(r):
            inner = _vadd(inner, P(L.bracket(P(a, n), P(b, r - k - 1)), k))
        for k in range(n):
            inner = _vadd(inner, P(L.bracket(P(a, n - k - 1), P(b, r)), k))
        rhs = _vadd(rhs, _vscale(w, inner))
    return lhs, rhs


def identity_suite(max_m: int, fixtures, seed: int = 0, samples: int = 3) -> list:
    """Run the generating-series, combinatorial and derivation identities.

    Returns a list of cells ``{"identity", "params", "ok", "witness"}``.
    """
    if max_m < 2:
        raise ValueError("max_m must be >= 2")
    cells = []
    miss = check_generating_identity(max_m)
    cells.append({"identity": "G(x+y)=L(x,y)+L(y,x)", "params": {"max_deg": max_m},
                  "ok": miss is None, "witness": None if miss is None else
                  {"mono": list(miss[0]), "lhs": format_rational(miss[1]), "rhs": format_rational(miss[2])}})
    for m in range(max_m + 1):
        ok = check_t_recurrence(m)
        cells.append({"identity": "1/m! = sum t_r/(n+1)!", "params": {"m": m}, "ok": ok, "witness": None})
    for m in range(max_m + 1):
        for p in range(m + 1):
            ok = check_binomial_t_identity(m, p)
            cells.append({"identity": "binom(m,p) t_m split", "params": {"m": m, "p": p}, "ok": ok,
                          "witness": None})
    rng = random.Random(seed)
    for L in fixtures:
        for sample in range(samples):
            y = random_vector(rng, L.dim)
            a = random_vector(rng, L.dim)
            b = random_vector(rng, L.dim)
            D = L.ad(y).matrix
            for m in range(min(max_m, 8) + 1):
                (l1, r1), (l2, r2) = leibniz_identities(L, D, a, b, m)
                l3, r3 = derivation_t_identity(L, D, a, b, m)
                params = {"algebra": L.name, "sample": sample, "m": m}
                for name, lhs, rhs in (("leibniz-first", l1, r1), ("leibniz-second", l2, r2),
                                       ("t_m D^m[a,b]", l3, r3)):
                    ok = lhs == rhs
                    cells.append({"identity": name, "params": params, "ok": ok, "witness": None if ok else
                                  {"defect": [format_rational(x - y) for x, y in zip(lhs, rhs)]}})
    return cells
