"""The wreath product W(A,B;d) = A[[Y]] × B and its triangular action on X×Y.

Elements are pairs (f, b) with f a series on Y valued in A and b ∈ B. The
bracket is [(f,b),(g,c)] = ([f,g] + d_b.g - d_c.f, [b,c]).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .action import FormalAction, pointwise_bracket, prolong
from .fundamental import DEFAULT_ORDER, fundamental_action
from .lie import LieAlgebra
from .polyjet import Jet, jet_from_json, jet_to_json, vorder
from .sampling import random_poly_jet, random_vector
from .spaces import DimensionError, SpaceDesc, format_rational, parse_rational, product_space
from .vectorfield import derive, embed_y


@dataclass(frozen=True, eq=False)
class WreathAlgebra:
    A: LieAlgebra
    B: LieAlgebra
    Y: SpaceDesc
    d: FormalAction
    order: int

    def __post_init__(self):
        if self.d.algebra != self.B:
            raise ValueError("the action d must be an action of B")
        if self.d.space.dim != self.Y.dim:
            raise DimensionError("the action d must act on Y")

    def element(self, f: Jet, b=None) -> "WreathElement":
        b = self.B.element(b) if b is not None else (0,) * self.B.dim
        return WreathElement(self._check_f(f), self.B.element(b))

    def zero(self) -> "WreathElement":
        return WreathElement(Jet.zero(self.Y, self.A.space, self.order), self.B.element((0,) * self.B.dim))

    def _check_f(self, f: Jet) -> Jet:
        if f.source.dim != self.Y.dim or f.target.dim != self.A.dim:
            raise DimensionError(f"f must be a series on {self.Y.name} valued in {self.A.space.name}")
        return f


def fundamental_wreath(A: LieAlgebra, B: LieAlgebra, N: int = DEFAULT_ORDER) -> WreathAlgebra:
    """W(A,B) = W(A,B;d) with d the fundamental action of B on itself."""
    return WreathAlgebra(A, B, B.space, fundamental_action(B, N), N)


@dataclass(frozen=True, eq=False)
class WreathElement:
    f: Jet
    b: tuple

    def __add__(self, other):
        return WreathElement(self.f + other.f, tuple(x + y for x, y in zip(self.b, other.b)))

    def __sub__(self, other):
        return WreathElement(self.f - other.f, tuple(x - y for x, y in zip(self.b, other.b)))

    def scale(self, c):
        return WreathElement(self.f.scale(c), tuple(c * x for x in self.b))

    def __eq__(self, other):
        if not isinstance(other, WreathElement):
            return NotImplemented
        return self.b == other.b and self.f == other.f

    def agrees_with(self, other: "WreathElement", up_to=None) -> bool:
        return self.b == other.b and self.f.agrees_with(other.f, up_to)


def star(b, f: Jet, W: WreathAlgebra) -> Jet:
    """b⋆f = d_b.f, the derivative of f along the vector field d_b."""
    W._check_f(f)
    return derive(W.d.image(b), f)


def wreath_bracket(u: WreathElement, v: WreathElement, W: WreathAlgebra) -> WreathElement:
    f = pointwise_bracket(u.f, v.f, W.A)
    f = f + star(u.b, v.f, W) - star(v.b, u.f, W)
    return WreathElement(f, W.B.bracket(u.b, v.b))


def triangular_field(W: WreathAlgebra, D: FormalAction, u: WreathElement, Z: SpaceDesc | None = None) -> Jet:
    """Δ_(f,b): X-components from the prolonged action D_f, Y-components from d_b."""
    if D.algebra != W.A:
        raise ValueError("D must be an action of the wreath product's A")
    Z = Z or product_space(D.space, W.Y)
    return prolong(D, u.f, Z) + embed_y(W.d.image(u.b), Z)


# ---------------------------------------------------------------------------
# JSON


def element_to_json(u: WreathElement) -> dict:
    return {"f": jet_to_json(u.f), "b": {"coords": [format_rational(c) for c in u.b]}}


def element_from_json(obj: Mapping, W: WreathAlgebra) -> WreathElement:
    try:
        f = jet_from_json(obj["f"], source=W.Y, target=W.A.space)
        coords = obj["b"]["coords"] if isinstance(obj["b"], Mapping) else obj["b"]
        b = tuple(parse_rational(c) for c in coords)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed wreath element: missing field {exc}") from None
    if len(b) != W.B.dim:
        raise ValueError(f"b has {len(b)} coordinates, B has dimension {W.B.dim}")
    return WreathElement(f, b)


# ---------------------------------------------------------------------------
# checks


def random_element(W: WreathAlgebra, rng: random.Random, max_deg: int = 3) -> WreathElement:
    f = random_poly_jet(rng, W.Y, W.A.space, max_deg)
    return WreathElement(f, random_vector(rng, W.B.dim))


def sigma_derivation_check(W: WreathAlgebra, seed: int = 0, samples: int = 5, max_deg: int = 3) -> list:
    """f.[a,b] = [f.a,b] + [a,f.b] and [f,g].a = f.(g.a) - g.(f.a) on random polynomial jets.

    Returns the failing cells (empty when both laws hold).
    """
    from .vectorfield import bracket_S

    rng = random.Random(seed)
    failures = []
    for k in range(samples):
        f = random_poly_jet(rng, W.Y, W.Y, max_deg)
        g = random_poly_jet(rng, W.Y, W.Y, max_deg)
        a = random_poly_jet(rng, W.Y, W.A.space, max_deg)
        b = random_poly_jet(rng, W.Y, W.A.space, max_deg)
        lhs = derive(f, pointwise_bracket(a, b, W.A))
        rhs = pointwise_bracket(derive(f, a), b, W.A) + pointwise_bracket(a, derive(f, b), W.A)
        diff = lhs.first_difference(rhs)
        if diff is not None:
            failures.append({"law": "derivation", "sample": k, "degree": diff[0]})
        lhs = derive(bracket_S(f, g), a)
        rhs = derive(f, derive(g, a)) - derive(g, derive(f, a))
        diff = lhs.first_difference(rhs)
        if diff is not None:
            failures.append({"law": "homomorphism", "sample": k, "degree": diff[0]})
    return failures


def compared_order(*jets: Jet) -> int:
    """Highest degree in which all ``jets`` are trusted."""
    v = min(vorder(j) for j in jets)
    return max(j.order for j in jets) if v == float("inf") else int(v)


def triangular_cells(W: WreathAlgebra, D: FormalAction, u: WreathElement, v: WreathElement) -> list:
    """Δ_[u,v] = [Δ_u, Δ_v] on X×Y, plus the two cross terms D_a.d_b = 0 and
    d_b.D_a = D_(d_b.a) for the components of u and v."""
    from .vectorfield import bracket_S

    Z = product_space(D.space, W.Y)
    out = []

    def record(name, lhs, rhs):
        diff = lhs.first_difference(rhs)
        out.append({"identity": name, "ok": diff is None, "degree": None if diff is None else diff[0],
                    "compared_up_to": compared_order(lhs, rhs)})

    lhs = triangular_field(W, D, wreath_bracket(u, v, W), Z)
    rhs = bracket_S(triangular_field(W, D, u, Z), triangular_field(W, D, v, Z))
    record("delta_bracket", lhs, rhs)
    Da, db = prolong(D, u.f, Z), embed_y(W.d.image(v.b), Z)
    record("D_a.d_b=0", derive(Da, db), Jet.zero(Z, Z, 0))
    record("d_b.D_a=D_(d_b.a)", derive(db, Da), prolong(D, star(v.b, u.f, W), Z))
    return out


def abelian_closed_form(f: Jet, g: Jet, b, c) -> Jet:
    """bg' - cf' for one-variable series f, g and scalars b, c."""
    from .polyjet import HomogeneousPoly

    def deriv(h):
        comps = []
        for m in range(h.order):
            coeffs = {(m,): tuple((m + 1) * x for x in vec) for (e,), vec in h.components[m + 1].coeffs.items()}
            comps.append(HomogeneousPoly(h.source, h.target, m, coeffs))
        comps.append(HomogeneousPoly.zero(h.source, h.target, h.order))
        return Jet(h.source, h.target, comps, polynomial=h.polynomial)

    return deriv(g).scale(b) - deriv(f).scale(c)


def nilpotent_star_oracle(W: WreathAlgebra, b, f: Jet, m: int, x) -> tuple:
    """(b⋆f)_m(x) = Df_{m+1}(x)·b + ½ Df_m(x)·[x,b] when (ad y)² = 0 on B.

    Directional derivatives are taken from the symmetric multilinear form:
    D f_r(x)·v = r u_r(v, x, ..., x).
    """
    from .polyjet import polarize

    b = W.B.element(b)
    x = tuple(x)

    def dd(r, v):
        if r < 1 or r > f.order:
            return (0,) * W.A.dim
        fr = f.components[r]
        if fr.is_zero():
            return (0,) * W.A.dim
        u = polarize(fr)
        return tuple(r * c for c in u(v, *([x] * (r - 1))))

    first = dd(m + 1, b)
    second = dd(m, W.B.bracket(x, b))
    return tuple(Fraction(p) + Fraction(q) / 2 for p, q in zip(first, second))
