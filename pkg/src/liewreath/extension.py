"""Extensions A -> C -> B with a linear section s, and the embedding of C into
the fundamental wreath product W(A,B).

Notation: R = ad(s y) acting on C (linear in y ∈ B), e = s∘p.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Mapping, Sequence

from .lie import LieAlgebra, composite_nilpotency, load_lie, symbolic_ad_apply
from .polyjet import HomogeneousPoly, Jet, LinearMap
from .spaces import ZERO, SpaceDesc, matrix_rank, parse_rational, solve_columns
from .fundamental import DEFAULT_ORDER, t
from .wreath import WreathAlgebra, WreathElement, fundamental_wreath, wreath_bracket


class ExtensionError(ValueError):
    """An invalid extension; ``kind`` names the violated condition."""

    def __init__(self, kind: str, message: str, witness=None):
        self.kind, self.witness = kind, witness
        super().__init__(f"{kind}: {message}")


class NotNilpotentError(ValueError):
    pass


def _mat(rows, n_rows, n_cols, what):
    try:
        M = tuple(tuple(parse_rational(c) if isinstance(c, str) else Fraction(c) for c in r) for r in rows)
    except TypeError:
        raise ExtensionError("shape", f"{what} is not a matrix") from None
    if len(M) != n_rows or any(len(r) != n_cols for r in M):
        raise ExtensionError("shape", f"{what} must be {n_rows}x{n_cols}")
    return M


def _unit(n, i):
    return tuple(Fraction(1) if k == i else ZERO for k in range(n))


def _matvec(M, v):
    return tuple(sum((a * b for a, b in zip(row, v) if a and b), ZERO) for row in M)


@dataclass(frozen=True, eq=False)
class Extension:
    C: LieAlgebra
    B: LieAlgebra
    p: LinearMap
    ideal_basis: tuple
    s: LinearMap
    A: LieAlgebra

    @property
    def e(self) -> LinearMap:
        return self.s.compose(self.p)

    def to_ideal(self, v) -> tuple:
        """A-coordinates of a vector of C known to lie in the ideal."""
        sol = solve_columns(self.ideal_basis, v)
        if sol is None:
            raise ExtensionError("containment", f"vector {v} is not in the ideal")
        return sol

    def from_ideal(self, coords) -> tuple:
        out = [ZERO] * self.C.dim
        for c, a in zip(coords, self.ideal_basis):
            for i, x in enumerate(a):
                out[i] += c * x
        return tuple(out)

    def R_matrices(self) -> list:
        """ad(s e_i) on C for each basis vector e_i of B; R = Σ y_i ad(s e_i)."""
        return [self.C.ad(self.s(_unit(self.B.dim, i))).matrix for i in range(self.B.dim)]


def make_extension(C, B, p, ideal_basis: Sequence, s, zipper_order: int = 6) -> Extension:
    """Validate and build an extension; raises :class:`ExtensionError` with a witness."""
    C, B = load_lie(C), load_lie(B)
    pm = p.matrix if isinstance(p, LinearMap) else _mat(p, B.dim, C.dim, "p")
    sm = s.matrix if isinstance(s, LinearMap) else _mat(s, C.dim, B.dim, "s")
    P = LinearMap(C.space, B.space, pm)
    S = LinearMap(B.space, C.space, sm)
    ideal = tuple(C.element(v) for v in ideal_basis)

    ps = P.compose(S)
    for i in range(B.dim):
        col = ps(_unit(B.dim, i))
        if col != _unit(B.dim, i):
            raise ExtensionError("not-a-section", f"p(s({B.labels[i]})) = {col}", witness=i)
    for i in range(C.dim):
        for j in range(i + 1, C.dim):
            lhs = P(C.table[i][j])
            rhs = B.bracket(P(_unit(C.dim, i)), P(_unit(C.dim, j)))
            if lhs != rhs:
                raise ExtensionError("not-a-homomorphism",
                                     f"p[{C.labels[i]},{C.labels[j]}] != [p {C.labels[i]}, p {C.labels[j]}]",
                                     witness=(i, j))
    dimA = C.dim - B.dim
    for k, a in enumerate(ideal):
        if any(P(a)):
            raise ExtensionError("kernel-mismatch", f"ideal vector {k} is not in ker p", witness=k)
    if len(ideal) != dimA or matrix_rank([list(a) for a in ideal]) != dimA:
        raise ExtensionError("kernel-mismatch", f"ideal basis must be {dimA} independent vectors of ker p")
    for i in range(C.dim):
        for k, a in enumerate(ideal):
            w = C.bracket(_unit(C.dim, i), a)
            if solve_columns(ideal, w) is None:
                raise ExtensionError("not-an-ideal", f"[{C.labels[i]}, a{k + 1}] leaves the ideal",
                                     witness=(i, k))
    A = _ideal_algebra(C, ideal)
    ext = Extension(C, B, P, ideal, S, A)
    _zipper_selftest(ext, zipper_order)
    return ext


def _ideal_algebra(C: LieAlgebra, ideal) -> LieAlgebra:
    n = len(ideal)
    labels = []
    for k, a in enumerate(ideal):
        support = [i for i, x in enumerate(a) if x]
        unit = len(support) == 1 and a[support[0]] == 1
        labels.append(C.labels[support[0]] if unit else f"a{k + 1}")
    table = [[solve_columns(ideal, C.bracket(ideal[i], ideal[j])) for j in range(n)] for i in range(n)]
    return LieAlgebra(SpaceDesc("A", tuple(labels)), tuple(tuple(r) for r in table), "A")


def _zipper_selftest(ext: Extension, max_total: int):
    # p R^n e R^k = p R^{n+k}, with R = ad(s y) for y a basis vector of B
    e = ext.e.matrix
    for yi in range(ext.B.dim):
        R = ext.C.ad(ext.s(_unit(ext.B.dim, yi))).matrix
        for ci in range(ext.C.dim):
            pows = [_unit(ext.C.dim, ci)]
            for _ in range(max_total):
                pows.append(_matvec(R, pows[-1]))
            for k in range(max_total + 1):
                v = _matvec(e, pows[k])
                for n in range(max_total - k + 1):
                    if ext.p(v) != ext.p(pows[n + k]):
                        raise ExtensionError("zipper", f"p R^{n} e R^{k} != p R^{n + k} at "
                                             f"y={ext.B.labels[yi]}, c={ext.C.labels[ci]}",
                                             witness=(n, k, yi, ci))
                    v = _matvec(R, v)


# ---------------------------------------------------------------------------
# the series h_c = u_c - v_c


def _R_powers(ext: Extension, start: HomogeneousPoly, N: int, mats) -> list:
    out = [start]
    for _ in range(N):
        out.append(symbolic_ad_apply(ext.C, mats, out[-1]))
    return out


def uv_components(ext: Extension, c, N: int) -> tuple:
    """Lists (u_0..u_N), (v_0..v_N) of C-valued homogeneous polynomials in y,
    u_m = R^m c/m!, v_m = Σ_{n+r=m} t_r/(n+1)! R^n e R^r c."""
    c = ext.C.element(c)
    mats = ext.R_matrices()
    Rc = _R_powers(ext, HomogeneousPoly.constant(ext.B.space, ext.C.space, c), N, mats)
    u = [Rc[m].scale(Fraction(1, factorial(m))) for m in range(N + 1)]
    v = [HomogeneousPoly.zero(ext.B.space, ext.C.space, m) for m in range(N + 1)]
    e = ext.e.matrix
    for r in range(N + 1):
        if not t(r) or Rc[r].is_zero():
            continue
        chain = _R_powers(ext, Rc[r].map_values(e, ext.C.space), N - r, mats)
        for n, term in enumerate(chain):
            v[n + r] = v[n + r] + term.scale(t(r) / factorial(n + 1))
    return u, v


def _c_jet(ext, comps) -> Jet:
    return Jet(ext.B.space, ext.C.space, comps)


def u_series(ext: Extension, c, N: int) -> Jet:
    return _c_jet(ext, uv_components(ext, c, N)[0])


def v_series(ext: Extension, c, N: int) -> Jet:
    return _c_jet(ext, uv_components(ext, c, N)[1])


def _to_A_poly(ext: Extension, poly: HomogeneousPoly, m: int) -> HomogeneousPoly:
    coeffs = {}
    for mono, vec in poly.coeffs.items():
        if any(ext.p(vec)):
            raise ExtensionError("containment", f"degree-{m} coefficient at y^{mono} has p ≠ 0",
                                 witness=(m, mono))
        coeffs[mono] = ext.to_ideal(vec)
    return HomogeneousPoly(ext.B.space, ext.A.space, m, coeffs)


def h_series_C(ext: Extension, c, N: int) -> Jet:
    """h_c in C-coordinates, before re-expression in the ideal."""
    u, v = uv_components(ext, c, N)
    return _c_jet(ext, [a - b for a, b in zip(u, v)])


def h_series(ext: Extension, c, N: int = DEFAULT_ORDER) -> Jet:
    """h_c ∈ A[[B]] to order N; every component is checked to lie in the ideal."""
    if N < 0:
        raise ValueError("N must be >= 0")
    hc = h_series_C(ext, c, N)
    comps = [_to_A_poly(ext, hm, m) for m, hm in enumerate(hc.components)]
    return Jet(ext.B.space, ext.A.space, comps)


def kk_embed(ext: Extension, c, N: int = DEFAULT_ORDER) -> WreathElement:
    """f_s(c) = (h_c, p c)."""
    return WreathElement(h_series(ext, c, N), ext.p(ext.C.element(c)))


def embedding_wreath(ext: Extension, N: int = DEFAULT_ORDER) -> WreathAlgebra:
    return fundamental_wreath(ext.A, ext.B, N)


def verify_embedding(ext: Extension, N: int = DEFAULT_ORDER, W: WreathAlgebra | None = None) -> dict:
    """Homomorphism on all basis pairs in degrees <= N-1, and injectivity by rank."""
    if N < 2:
        raise ValueError("N must be >= 2")
    W = W or embedding_wreath(ext, N)
    C = ext.C
    images = [kk_embed(ext, _unit(C.dim, i), N) for i in range(C.dim)]
    cells = []
    for i in range(C.dim):
        for j in range(i + 1, C.dim):
            lhs = wreath_bracket(images[i], images[j], W)
            rhs = kk_embed(ext, C.table[i][j], N)
            top = N - 1
            diff = lhs.f.first_difference(rhs.f, top)
            ok = diff is None and lhs.b == rhs.b
            cells.append({"pair": [C.labels[i], C.labels[j]], "ok": ok, "compared_up_to": top,
                          "degree": None if diff is None else diff[0],
                          "defect": None if diff is None else _defect_terms(diff[1])})
    rows = [list(ext.from_ideal(images[i].f.components[0].coeffs.get((0,) * ext.B.dim,
                                                                       (ZERO,) * ext.A.dim)))
            + list(images[i].b) for i in range(C.dim)]
    rank = matrix_rank(rows)
    return {"homomorphism": cells, "injective": rank == C.dim, "rank": rank,
            "ok": rank == C.dim and all(cell["ok"] for cell in cells)}


def _defect_terms(poly: HomogeneousPoly) -> list:
    from .spaces import format_rational

    return [{"mono": list(m), "v": [format_rational(c) for c in v]} for m, v in sorted(poly.coeffs.items())]


# ---------------------------------------------------------------------------
# closed form when R is nilpotent


def nilpotency_of_R(ext: Extension):
    """k with every k-fold composite of ad(s e_i) zero on C, or None."""
    return composite_nilpotency(ext.R_matrices(), ext.C.dim + 1)


def h_closed_form_nilpotent(ext: Extension, c, N: int = DEFAULT_ORDER) -> Jet:
    """(Σ R^k/k! - (Σ R^k/(k+1)!) e (Σ t_k R^k)) c as a polynomial jet in A-coordinates."""
    K = nilpotency_of_R(ext)
    if K is None:
        raise NotNilpotentError("ad(s y) is not nilpotent on C; the closed form does not apply")
    c = ext.C.element(c)
    mats = ext.R_matrices()
    Rc = _R_powers(ext, HomogeneousPoly.constant(ext.B.space, ext.C.space, c), K - 1, mats)
    top = 2 * (K - 1)
    comps = [HomogeneousPoly.zero(ext.B.space, ext.C.space, m) for m in range(max(top, N) + 1)]
    for k in range(K):
        comps[k] = comps[k] + Rc[k].scale(Fraction(1, factorial(k)))
    e = ext.e.matrix
    for j in range(K):
        eg = Rc[j].scale(t(j)).map_values(e, ext.C.space)
        for i, term in enumerate(_R_powers(ext, eg, K - 1, mats)):
            comps[i + j] = comps[i + j] - term.scale(Fraction(1, factorial(i + 1)))
    return Jet(ext.B.space, ext.A.space, [_to_A_poly(ext, p, m) for m, p in enumerate(comps)],
               polynomial=True)


# ---------------------------------------------------------------------------
# decomposition identities used in the homomorphism proof


def _pw_C(ext, f, g) -> Jet:
    from .action import pointwise_bracket

    return pointwise_bracket(f, g, ext.C)


def _star_C(W: WreathAlgebra, b, f: Jet) -> Jet:
    from .vectorfield import derive

    return derive(W.d.image(b), f)


def proof_identities(ext: Extension, max_m: int = 6, W: WreathAlgebra | None = None) -> list:
    """Check, on all basis pairs (a, b) of C and degrees <= max_m:

    u-bracket:  u_[a,b] = [u_a, u_b]
    star-u:     pa⋆u_b = [v_a, u_b]
    star-v:     pa⋆v_b - pb⋆v_a = [v_a, v_b] + v_[a,b]

    Series are built to order max_m + 1 so the star products are trusted to max_m.
    """
    N = max_m + 1
    W = W or embedding_wreath(ext, N)
    C = ext.C
    uv = [uv_components(ext, _unit(C.dim, i), N) for i in range(C.dim)]
    U = [_c_jet(ext, x[0]) for x in uv]
    V = [_c_jet(ext, x[1]) for x in uv]
    P = [ext.p(_unit(C.dim, i)) for i in range(C.dim)]
    cells = []
    for i in range(C.dim):
        for j in range(C.dim):
            if i == j:
                continue
            pair = [C.labels[i], C.labels[j]]
            checks = []
            if i < j:
                ub, vb = uv_components(ext, C.table[i][j], N)
                checks.append(("u-bracket", _c_jet(ext, ub), _pw_C(ext, U[i], U[j])))
                checks.append(("star-v", _star_C(W, P[i], V[j]) - _star_C(W, P[j], V[i]),
                               _pw_C(ext, V[i], V[j]) + _c_jet(ext, vb)))
            checks.append(("star-u", _star_C(W, P[i], U[j]), _pw_C(ext, V[i], U[j])))
            for name, lhs, rhs in checks:
                diff = lhs.first_difference(rhs, max_m)
                cells.append({"identity": name, "pair": pair, "ok": diff is None,
                              "degree": None if diff is None else diff[0]})
    return cells


# ---------------------------------------------------------------------------
# JSON


def extension_from_json(obj: Mapping, base: Path | None = None) -> Extension:
    try:
        Cref, Bref = obj["C"], obj["B"]
        p, ideal, s = obj["p"], obj["ideal"], obj["s"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed extension: missing field {exc}") from None

    def resolve(ref):
        if isinstance(ref, str) and base is not None and (base / ref).exists():
            return base / ref
        return ref

    C, B = load_lie(resolve(Cref)), load_lie(resolve(Bref))
    ideal = [[parse_rational(x) for x in v] for v in ideal]
    return make_extension(C, B, p, ideal, s)


def extension_to_json(ext: Extension) -> dict:
    from .lie import lie_to_json
    from .spaces import format_rational

    fm = lambda M: [[format_rational(c) for c in r] for r in M]
    return {"C": lie_to_json(ext.C), "B": lie_to_json(ext.B), "p": fm(ext.p.matrix),
            "ideal": fm(ext.ideal_basis), "s": fm(ext.s.matrix)}


EXTENSION_FIXTURES = ("solvable_2_extension", "solvable_2_extension_alt", "heisenberg_center_extension",
                      "direct_product_extension")


def load_extension(ref) -> Extension:
    from .lie import load_fixture_json

    if isinstance(ref, Extension):
        return ref
    if isinstance(ref, Mapping):
        return extension_from_json(ref)
    path = Path(ref)
    if path.exists():
        return extension_from_json(json.loads(path.read_text()), base=path.parent)
    return extension_from_json(load_fixture_json(path.stem if path.suffix == ".json" else str(ref)))
