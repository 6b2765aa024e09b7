"""Derivative of a series along a formal vector field, and the Lie bracket on S(X).

With ξ ∈ S(X) = X[[X]] and f ∈ F[[X]], the derivative ξ.f is the series
x -> Df(x)·ξ(x). It is computed monomial by monomial as Σ_i ξ^(i) ∂f/∂x_i.
The bracket is [ξ, η] = ξ.η - η.ξ.
"""
from __future__ import annotations

import math
from collections import defaultdict

from .polyjet import CurriedJet, HomogeneousPoly, Jet, curry, uncurry, vorder
from .spaces import ZERO, DimensionError, SpaceDesc, mono_add, product_space


def _check_field(xi: Jet):
    if xi.source.dim != xi.target.dim:
        raise DimensionError("a vector field jet must map X to X")


def _derive_component(xi_r: HomogeneousPoly, f_m: HomogeneousPoly, source, target) -> dict:
    """Σ_i ξ_r^(i) · ∂f_m/∂x_i as a raw accumulator mono -> list."""
    acc = defaultdict(lambda: [ZERO] * target.dim)
    n = source.dim
    xi_items = list(xi_r.coeffs.items())
    if not xi_items:
        return acc
    for alpha, fvec in f_m.coeffs.items():
        for i in range(n):
            a = alpha[i]
            if not a:
                continue
            beta = alpha[:i] + (a - 1,) + alpha[i + 1:]
            for gamma, xvec in xi_items:
                c = xvec[i]
                if not c:
                    continue
                w = a * c
                slot = acc[mono_add(beta, gamma)]
                for k, v in enumerate(fvec):
                    if v:
                        slot[k] += w * v
    return acc


def _output_order(a: Jet, b: Jet, loss: int) -> int:
    if a.polynomial and b.polynomial:
        return max(a.degree() + b.degree() - loss, 0)
    if a.polynomial:
        return b.order
    if b.polynomial:
        return a.order
    return min(a.order, b.order)


def derive(xi: Jet, f: Jet) -> Jet:
    """ξ.f, the derivative of ``f`` along the vector field ``xi``.

    Degree bookkeeping: components of degrees r and m give degree r + m - 1.
    The trusted order is min(valid(ξ), valid(f) - 1), or min(valid(ξ), valid(f))
    when ξ has no constant term; polynomial inputs are exact.
    """
    _check_field(xi)
    if xi.source.dim != f.source.dim:
        raise DimensionError(f"ξ lives on {xi.source.name}, f on {f.source.name}")
    order = _output_order(xi, f, 1)
    xi0_zero = not xi.has_constant_term()
    valid = min(vorder(xi), vorder(f) if xi0_zero else vorder(f) - 1, order)
    polynomial = xi.polynomial and f.polynomial
    buckets = [defaultdict(lambda: [ZERO] * f.target.dim) for _ in range(order + 1)]
    for r in range(xi.order + 1):
        xi_r = xi.components[r]
        if xi_r.is_zero():
            continue
        for m in range(1, f.order + 1):
            s = r + m - 1
            if s > order:
                break
            part = _derive_component(xi_r, f.components[m], f.source, f.target)
            bucket = buckets[s]
            for mono, vec in part.items():
                slot = bucket[mono]
                for k, v in enumerate(vec):
                    if v:
                        slot[k] += v
    comps = [HomogeneousPoly(f.source, f.target, s, {k: tuple(v) for k, v in b.items()})
             for s, b in enumerate(buckets)]
    if valid == math.inf:
        valid = order
    return Jet(f.source, f.target, comps, int(valid), polynomial)


def bracket_S(xi: Jet, eta: Jet) -> Jet:
    """[ξ, η] = ξ.η - η.ξ in S(X)."""
    _check_field(xi)
    _check_field(eta)
    if xi.source.dim != eta.source.dim:
        raise DimensionError("fields live on different spaces")
    return derive(xi, eta) - derive(eta, xi)


# ---------------------------------------------------------------------------
# embeddings into S(X×Y)


def _pad_target(f: Jet, Z: SpaceDesc, offset: int) -> Jet:
    comps = []
    for c in f.components:
        coeffs = {}
        for mono, vec in c.coeffs.items():
            full = [ZERO] * Z.dim
            full[offset:offset + len(vec)] = vec
            coeffs[mono] = tuple(full)
        comps.append(HomogeneousPoly._raw(f.source, Z, c.degree, coeffs))
    return Jet(f.source, Z, comps, f.valid_order, f.polynomial)


def _extend_source(f: Jet, Z: SpaceDesc, offset: int) -> Jet:
    comps = []
    for c in f.components:
        coeffs = {}
        for mono, vec in c.coeffs.items():
            full = [0] * Z.dim
            full[offset:offset + len(mono)] = mono
            coeffs[tuple(full)] = vec
        comps.append(HomogeneousPoly._raw(Z, f.target, c.degree, coeffs))
    return Jet(Z, f.target, comps, f.valid_order, f.polynomial)


def embed_x(xi: Jet, Z: SpaceDesc) -> Jet:
    """A field on X seen on Z = X×Y: (x, y) -> (ξ(x), 0)."""
    _check_field(xi)
    if Z.split != xi.source.dim:
        raise DimensionError("Z does not start with a copy of X")
    return _pad_target(_extend_source(xi, Z, 0), Z, 0)


def embed_y(eta: Jet, Z: SpaceDesc) -> Jet:
    """A field on Y seen on Z = X×Y: (x, y) -> (0, η(y))."""
    _check_field(eta)
    if Z.split is None or Z.dim - Z.split != eta.source.dim:
        raise DimensionError("Z does not end with a copy of Y")
    return _pad_target(_extend_source(eta, Z, Z.split), Z, Z.split)


def lift_function_y(f: Jet, Z: SpaceDesc) -> Jet:
    """A series on Y seen as a series on X×Y independent of x."""
    if Z.split is None or Z.dim - Z.split != f.source.dim:
        raise DimensionError("Z does not end with a copy of Y")
    return _extend_source(f, Z, Z.split)


def embed_field_x_valued(f: Jet) -> Jet:
    """A jet Z -> X (Z = X×Y) seen as a field on Z with zero Y-components."""
    Z = f.source
    if Z.split != f.target.dim:
        raise DimensionError("target must be the X factor of the source product")
    return _pad_target(f, Z, 0)


# ---------------------------------------------------------------------------
# pointwise derivative for series in y with coefficients in x


def _pair_product(xi: CurriedJet, f: CurriedJet, op, target, loss):
    """Σ_{β,γ} y^(β+γ) op(ξ_β, f_γ) for curried jets, with valid-order tracking."""
    if xi.polynomial and f.polynomial:
        N = xi.order + f.order
    elif xi.polynomial or f.polynomial:
        N = f.order if xi.polynomial else xi.order
    else:
        N = min(xi.order, f.order)
    acc = {}
    for beta, xj in xi.coeffs.items():
        for gamma, fj in f.coeffs.items():
            delta = mono_add(beta, gamma)
            d = sum(delta)
            if d > N:
                continue
            piece = op(xj, fj)
            piece = piece.truncate(N - d) if piece.order >= N - d else _grow(piece, N - d)
            acc[delta] = acc[delta] + piece if delta in acc else piece
    return acc, N


def _grow(j: Jet, order: int) -> Jet:
    if j.polynomial:
        return j.truncate(order)
    comps = list(j.components) + [HomogeneousPoly.zero(j.source, j.target, m)
                                  for m in range(j.order + 1, order + 1)]
    return Jet(j.source, j.target, comps, j.valid_order, False)


def derive_pointwise(xi: CurriedJet, f: CurriedJet) -> CurriedJet:
    """y -> ξ(y).f(y): derivative in x only, for every value of y."""
    if xi.inner.dim != f.inner.dim or xi.outer.dim != f.outer.dim:
        raise DimensionError("curried jets have different variable spaces")
    acc, N = _pair_product(xi, f, derive, f.target, 1)
    valid = _curried_valid(xi, f, N, loss=0 if _no_x_constant(xi) else 1)
    return CurriedJet(f.outer, f.inner, f.target, N, acc, valid_order=valid,
                      polynomial=xi.polynomial and f.polynomial)


def bracket_pointwise_S(f: CurriedJet, g: CurriedJet) -> CurriedJet:
    """Bracket of S(X)[[Y]] inherited pointwise from S(X)."""
    acc, N = _pair_product(f, g, bracket_S, f.target, 1)
    loss = 0 if _no_x_constant(f) and _no_x_constant(g) else 1
    valid = min(_curried_valid(f, g, N, loss), _curried_valid(g, f, N, loss))
    return CurriedJet(f.outer, f.inner, f.target, N, acc, valid_order=valid,
                      polynomial=f.polynomial and g.polynomial)


def _no_x_constant(cj: CurriedJet) -> bool:
    return all(not j.has_constant_term() for j in cj.coeffs.values())


def _curried_valid(a: CurriedJet, b: CurriedJet, N: int, loss: int) -> int:
    va = math.inf if a.polynomial else a.valid_order
    vb = math.inf if b.polynomial else b.valid_order
    v = min(va, vb - loss, N)
    return max(int(v), -1)


def derive_pointwise_consistency(xi: CurriedJet, f: CurriedJet) -> dict:
    """Compare pointwise derivation in x with global derivation on X×Y.

    ξ is embedded as (x, y) -> (ξ(y)(x), 0). Returns a report with
    ``ok`` and, on failure, the first differing degree.
    """
    Z = product_space(f.inner, f.outer)
    if xi.target.dim != xi.inner.dim:
        raise DimensionError("ξ must take values in the inner space X")
    pointwise = derive_pointwise(xi, f)
    xi_z = embed_field_x_valued(uncurry(xi, Z))
    global_ = derive(xi_z, uncurry(f, Z))
    lhs = curry(global_, outer=f.outer, inner=f.inner)
    via_uncurry = uncurry(pointwise, Z)
    diff = global_.first_difference(via_uncurry)
    return {"ok": diff is None, "first_difference": None if diff is None else diff[0],
            "compared_up_to": min(vorder(global_), vorder(via_uncurry), global_.order),
            "curried": lhs}
