"""Formal actions A -> S(X), the pointwise Lie algebra A[[Y]], prolongation
of an action to A[[Y]] acting on X×Y, and the embedding S(X)[[Y]] -> S(X×Y)."""
from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .lie import LieAlgebra, load_lie, lie_to_json
from .polyjet import (
    CurriedJet,
    HomogeneousPoly,
    Jet,
    jet_from_json,
    jet_to_json,
    uncurry,
    vorder,
)
from .spaces import ZERO, DimensionError, SpaceDesc, format_rational, mono_add, product_space
from .vectorfield import bracket_S, embed_field_x_valued


class ActionDefect(ValueError):
    """The images do not define a Lie algebra homomorphism into S(X)."""

    def __init__(self, pair, degree, defect: HomogeneousPoly, labels=None):
        self.pair, self.degree, self.defect = pair, degree, defect
        names = pair if labels is None else (labels[pair[0]], labels[pair[1]])
        terms = ", ".join(f"{m}:{[format_rational(c) for c in v]}" for m, v in sorted(defect.coeffs.items()))
        super().__init__(f"D_[a,b] != [D_a, D_b] for basis pair {names} in degree {degree}: {terms}")


@dataclass(frozen=True, eq=False)
class FormalAction:
    algebra: LieAlgebra
    space: SpaceDesc
    images: tuple  # one vector-field jet per basis element of the algebra
    order: int

    def image(self, a) -> Jet:
        """D_a for a ∈ A given by coordinates, a label, or a Vec."""
        coords = self.algebra.element(a)
        total = None
        for c, img in zip(coords, self.images):
            if c:
                total = img.scale(c) if total is None else total + img.scale(c)
        if total is None:
            return Jet.zero(self.space, self.space, self.order, polynomial=self.images[0].polynomial)
        return total

    @property
    def valid_order(self) -> int:
        return min(vorder(j) for j in self.images) if not self.polynomial else self.order

    @property
    def polynomial(self) -> bool:
        return all(j.polynomial for j in self.images)


def make_action(algebra: LieAlgebra, space: SpaceDesc, images: Sequence[Jet], order: int | None = None,
                check: bool = True) -> FormalAction:
    """Validate D_[e_i, e_j] = [D_{e_i}, D_{e_j}] on all basis pairs up to the trusted order."""
    images = tuple(images)
    if len(images) != algebra.dim:
        raise ValueError(f"{len(images)} images for an algebra of dim {algebra.dim}")
    for img in images:
        if img.source.dim != space.dim or img.target.dim != space.dim:
            raise DimensionError("every image must be a vector field jet on the action space")
    if order is None:
        order = max(j.order for j in images)
    act = FormalAction(algebra, space, images, order)
    if check:
        for i in range(algebra.dim):
            for j in range(i + 1, algebra.dim):
                lhs = act.image(algebra.table[i][j])
                rhs = bracket_S(images[i], images[j])
                diff = lhs.first_difference(rhs)
                if diff is not None:
                    raise ActionDefect((i, j), diff[0], diff[1], algebra.labels)
    return act


def action_to_json(D: FormalAction, algebra_ref=None) -> dict:
    return {
        "algebra": algebra_ref if algebra_ref is not None else lie_to_json(D.algebra),
        "space": list(D.space.basis_labels),
        "order": D.order,
        "images": {lab: jet_to_json(j) for lab, j in zip(D.algebra.labels, D.images)},
    }


def action_from_json(obj: Mapping, base: Path | None = None) -> FormalAction:
    try:
        alg_ref = obj["algebra"]
        labels = obj["space"]
        order = int(obj["order"])
        raw = obj["images"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed action: missing or invalid field {exc}") from None
    if isinstance(alg_ref, str) and base is not None and (base / alg_ref).exists():
        alg_ref = base / alg_ref
    A = load_lie(alg_ref)
    X = SpaceDesc("X", tuple(labels))
    missing = [l for l in A.labels if l not in raw]
    if missing:
        raise ValueError(f"action images missing for basis labels {missing}")
    images = [jet_from_json(raw[l], source=X, target=X) for l in A.labels]
    return make_action(A, X, images, order)


def load_action(ref) -> FormalAction:
    from .lie import load_fixture_json

    if isinstance(ref, FormalAction):
        return ref
    path = Path(ref)
    if path.exists():
        return action_from_json(json.loads(path.read_text()), base=path.parent)
    return action_from_json(load_fixture_json(path.stem if path.suffix == ".json" else str(ref)))


# ---------------------------------------------------------------------------
# the pointwise Lie algebra A[[Y]]


def pointwise_bracket(f: Jet, g: Jet, A: LieAlgebra) -> Jet:
    """[f, g](y) = [f(y), g(y)]; degree s collects [f_n, g_r] with n + r = s."""
    if f.target.dim != A.dim or g.target.dim != A.dim:
        raise DimensionError("coefficient jets must take values in the algebra")
    if f.source.dim != g.source.dim:
        raise DimensionError("coefficient jets have different variable spaces")
    if f.polynomial and g.polynomial:
        order = max(f.degree() + g.degree(), 0)
    elif f.polynomial:
        order = g.order
    elif g.polynomial:
        order = f.order
    else:
        order = min(f.order, g.order)
    valid = min(vorder(f), vorder(g), order)
    buckets = [defaultdict(lambda: [ZERO] * A.dim) for _ in range(order + 1)]
    for n, fn in enumerate(f.components):
        if fn.is_zero():
            continue
        for r, gr in enumerate(g.components):
            if n + r > order:
                break
            bucket = buckets[n + r]
            for m1, v1 in fn.coeffs.items():
                for m2, v2 in gr.coeffs.items():
                    w = A.bracket(v1, v2)
                    if any(w):
                        slot = bucket[mono_add(m1, m2)]
                        for k, c in enumerate(w):
                            if c:
                                slot[k] += c
    comps = [HomogeneousPoly(f.source, f.target, s, {k: tuple(v) for k, v in b.items()})
             for s, b in enumerate(buckets)]
    return Jet(f.source, f.target, comps, int(valid), f.polynomial and g.polynomial)


# ---------------------------------------------------------------------------
# prolongation and embedding


def prolong(D: FormalAction, a: Jet, Z: SpaceDesc | None = None) -> Jet:
    """D_a ∈ S(X×Y) for a ∈ A[[Y]]: substitute a into the linear map D.

    The coefficient of x^α y^β is Σ_k a_β[k] (D_{e_k})_α in the X-coordinates;
    Y-coordinates vanish.
    """
    A = D.algebra
    if a.target.dim != A.dim:
        raise DimensionError("a must take values in the acting algebra")
    Y = a.source
    Z = Z or product_space(D.space, Y)
    if Z.split != D.space.dim or Z.dim != D.space.dim + Y.dim:
        raise DimensionError("Z must be X×Y")
    poly = a.polynomial and D.polynomial
    if poly:
        order = max(a.degree(), 0) + max((j.degree() for j in D.images), default=0)
        order = max(order, 0)
    elif a.polynomial:
        order = D.order
    elif D.polynomial:
        order = a.order
    else:
        order = min(D.order, a.order)
    valid = min(vorder(a), D.valid_order if not D.polynomial else math.inf, order)
    buckets = [defaultdict(lambda: [ZERO] * Z.dim) for _ in range(order + 1)]
    for b, ab in enumerate(a.components):
        if b > order:
            break
        for beta, avec in ab.coeffs.items():
            for k, ak in enumerate(avec):
                if not ak:
                    continue
                img = D.images[k]
                for d in range(min(img.order, order - b) + 1):
                    for alpha, xvec in img.components[d].coeffs.items():
                        slot = buckets[b + d][alpha + beta]
                        for i, c in enumerate(xvec):
                            if c:
                                slot[i] += ak * c
    comps = [HomogeneousPoly(Z, Z, s, {k: tuple(v) for k, v in bk.items()})
             for s, bk in enumerate(buckets)]
    return Jet(Z, Z, comps, int(valid), poly)


def embed_j(f: CurriedJet, Z: SpaceDesc | None = None) -> Jet:
    """j : S(X)[[Y]] -> S(X×Y); uncurry then pad with zero Y-components."""
    if f.target.dim != f.inner.dim:
        raise DimensionError("coefficients must be vector fields on the inner space")
    Z = Z or product_space(f.inner, f.outer)
    return embed_field_x_valued(uncurry(f, Z))
