"""Homogeneous polynomials, truncated formal series (jets) and multilinear maps.

A homogeneous polynomial of degree m from E to F is stored as a sparse table
mapping exponent tuples (length dim E, summing to m) to nonzero coordinate
tuples in F. A jet is the list of its homogeneous components of degrees
0..order together with ``valid_order``: the largest degree up to which the
components are trustworthy. Operations that lose a degree of accuracy lower
``valid_order`` instead of silently producing wrong top components.
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .spaces import (
    ONE,
    ZERO,
    DimensionError,
    SpaceDesc,
    Vec,
    format_rational,
    mono_add,
    monomial_eval,
    parse_rational,
    product_space,
    vadd,
    vscale,
)


class TruncationError(ValueError):
    """A component beyond the trustworthy order of a jet was requested."""


class NotSummableError(ValueError):
    """Substitution of a series with nonzero constant term into a proper series."""


def _same_dim(a: SpaceDesc, b: SpaceDesc, what: str):
    if a.dim != b.dim:
        raise DimensionError(f"{what}: {a.name} (dim {a.dim}) vs {b.name} (dim {b.dim})")


class HomogeneousPoly:
    """Degree-m homogeneous polynomial E -> F in monomial form."""

    __slots__ = ("source", "target", "degree", "coeffs")

    def __init__(self, source: SpaceDesc, target: SpaceDesc, degree: int, coeffs: Mapping = ()):
        self.source = source
        self.target = target
        self.degree = degree
        clean = {}
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        n, k = source.dim, target.dim
        for mono, vec in items:
            mono = tuple(mono)
            if len(mono) != n or sum(mono) != degree or min(mono, default=0) < 0:
                raise ValueError(f"monomial {mono} does not belong to degree {degree} on dim {n}")
            vec = tuple(Fraction(c) for c in vec)
            if len(vec) != k:
                raise DimensionError(f"coefficient of length {len(vec)} for target of dim {k}")
            if any(vec):
                clean[mono] = vec
        self.coeffs = clean

    @classmethod
    def _raw(cls, source, target, degree, coeffs):
        # trusted constructor: coeffs already validated and free of zero vectors
        obj = cls.__new__(cls)
        obj.source, obj.target, obj.degree, obj.coeffs = source, target, degree, coeffs
        return obj

    @classmethod
    def zero(cls, source, target, degree):
        return cls._raw(source, target, degree, {})

    @classmethod
    def constant(cls, source, target, value):
        return cls(source, target, 0, {(0,) * source.dim: tuple(value)})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, HomogeneousPoly):
            return NotImplemented
        return (self.degree == other.degree and self.source.dim == other.source.dim
                and self.target.dim == other.target.dim and self.coeffs == other.coeffs)

    def __repr__(self):
        return f"HomogeneousPoly(deg={self.degree}, {len(self.coeffs)} terms)"

    def _combine(self, other, sign):
        _same_dim(self.source, other.source, "source mismatch")
        _same_dim(self.target, other.target, "target mismatch")
        if self.degree != other.degree:
            raise ValueError("cannot add homogeneous polynomials of different degrees")
        out = dict(self.coeffs)
        for mono, vec in other.coeffs.items():
            cur = out.get(mono)
            if cur is None:
                new = vec if sign > 0 else tuple(-c for c in vec)
            else:
                new = tuple(a + b for a, b in zip(cur, vec)) if sign > 0 else tuple(
                    a - b for a, b in zip(cur, vec))
            if any(new):
                out[mono] = new
            else:
                out.pop(mono, None)
        return HomogeneousPoly._raw(self.source, self.target, self.degree, out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "HomogeneousPoly":
        c = Fraction(c)
        if not c:
            return HomogeneousPoly.zero(self.source, self.target, self.degree)
        return HomogeneousPoly._raw(self.source, self.target, self.degree,
                                    {m: vscale(c, v) for m, v in self.coeffs.items()})

    def __call__(self, x) -> tuple:
        coords = x.coords if isinstance(x, Vec) else tuple(Fraction(c) for c in x)
        if len(coords) != self.source.dim:
            raise DimensionError("evaluation point has the wrong dimension")
        out = [ZERO] * self.target.dim
        for mono, vec in self.coeffs.items():
            w = monomial_eval(mono, coords)
            if w:
                for k, c in enumerate(vec):
                    if c:
                        out[k] += w * c
        return tuple(out)

    def partial(self, i: int) -> "HomogeneousPoly":
        """Formal partial derivative along the i-th source coordinate."""
        out = {}
        for mono, vec in self.coeffs.items():
            a = mono[i]
            if a:
                m = mono[:i] + (a - 1,) + mono[i + 1:]
                out[m] = vscale(a, vec)
        if not self.degree:
            return HomogeneousPoly.zero(self.source, self.target, 0)
        return HomogeneousPoly._raw(self.source, self.target, self.degree - 1, out)

    def map_values(self, matrix, target: SpaceDesc) -> "HomogeneousPoly":
        """Apply a linear map (rows indexed by target coords) to every coefficient."""
        out = {}
        for mono, vec in self.coeffs.items():
            new = tuple(sum((r[j] * vec[j] for j in range(len(vec)) if r[j] and vec[j]), ZERO)
                        for r in matrix)
            if any(new):
                out[mono] = new
        return HomogeneousPoly._raw(self.source, target, self.degree, out)

    def coordinate(self, k: int) -> dict:
        """Scalar polynomial (mono -> Fraction) of the k-th target coordinate."""
        return {m: v[k] for m, v in self.coeffs.items() if v[k]}


def _empty_components(source, target, order):
    return [HomogeneousPoly.zero(source, target, m) for m in range(order + 1)]


class Jet:
    """Truncated formal series sum_{m<=order} f_m from ``source`` to ``target``.

    ``polynomial=True`` records that every component beyond ``order`` is known
    to vanish (the jet is an honest polynomial, not a truncation).
    """

    __slots__ = ("source", "target", "components", "valid_order", "polynomial")

    def __init__(self, source: SpaceDesc, target: SpaceDesc, components: Sequence[HomogeneousPoly],
                 valid_order: int | None = None, polynomial: bool = False):
        comps = tuple(components)
        if not comps:
            raise ValueError("a jet needs at least its degree-0 component")
        for m, c in enumerate(comps):
            if c.degree != m:
                raise ValueError(f"component {m} has degree {c.degree}")
            _same_dim(c.source, source, "component source")
            _same_dim(c.target, target, "component target")
        order = len(comps) - 1
        if valid_order is None:
            valid_order = order
        if valid_order > order:
            raise ValueError(f"valid_order {valid_order} exceeds order {order}")
        self.source = source
        self.target = target
        self.components = comps
        self.valid_order = max(valid_order, -1)
        self.polynomial = polynomial

    # construction ---------------------------------------------------------

    @classmethod
    def zero(cls, source, target, order, valid_order=None, polynomial=True):
        return cls(source, target, _empty_components(source, target, order), valid_order, polynomial)

    @classmethod
    def constant(cls, source, target, value, order):
        comps = _empty_components(source, target, order)
        comps[0] = HomogeneousPoly.constant(source, target, value)
        return cls(source, target, comps, order, polynomial=True)

    @classmethod
    def from_terms(cls, source, target, order, terms, valid_order=None, polynomial=False):
        """Build from an iterable of ``(mono, coord, value)`` or a mapping mono -> vector."""
        buckets = [defaultdict(lambda: [ZERO] * target.dim) for _ in range(order + 1)]
        if isinstance(terms, Mapping):
            for mono, vec in terms.items():
                d = sum(mono)
                if d <= order:
                    acc = buckets[d][tuple(mono)]
                    for k, c in enumerate(vec):
                        acc[k] += Fraction(c)
        else:
            for mono, coord, value in terms:
                d = sum(mono)
                if d <= order:
                    buckets[d][tuple(mono)][coord] += Fraction(value)
        comps = [HomogeneousPoly(source, target, m, {k: tuple(v) for k, v in b.items()})
                 for m, b in enumerate(buckets)]
        return cls(source, target, comps, valid_order, polynomial)

    @classmethod
    def identity(cls, space, order):
        terms = {tuple(1 if k == i else 0 for k in range(space.dim)):
                 tuple(ONE if k == i else ZERO for k in range(space.dim)) for i in range(space.dim)}
        return cls.from_terms(space, space, order, terms, polynomial=True)

    # basic structure ------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.components) - 1

    def component(self, m: int) -> HomogeneousPoly:
        if m < 0:
            return HomogeneousPoly.zero(self.source, self.target, 0)
        if m > self.order:
            if self.polynomial:
                return HomogeneousPoly.zero(self.source, self.target, m)
            raise TruncationError(f"degree {m} beyond order {self.order}")
        return self.components[m]

    def degree(self) -> int:
        """Highest degree carrying a nonzero component (-1 for the zero jet)."""
        for m in range(self.order, -1, -1):
            if not self.components[m].is_zero():
                return m
        return -1

    def is_zero(self, up_to: int | None = None) -> bool:
        top = self.order if up_to is None else min(up_to, self.order)
        return all(self.components[m].is_zero() for m in range(top + 1))

    def has_constant_term(self) -> bool:
        return not self.components[0].is_zero()

    def with_valid(self, valid_order: int) -> "Jet":
        return Jet(self.source, self.target, self.components, min(valid_order, self.order), self.polynomial)

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            if not self.polynomial:
                raise TruncationError(f"cannot extend a truncated jet from {self.order} to {order}")
            comps = list(self.components) + [HomogeneousPoly.zero(self.source, self.target, m)
                                             for m in range(self.order + 1, order + 1)]
            return Jet(self.source, self.target, comps, order, True)
        poly = self.polynomial and self.degree() <= order
        return Jet(self.source, self.target, self.components[: order + 1],
                   min(self.valid_order, order), poly)

    def retarget(self, source: SpaceDesc | None = None, target: SpaceDesc | None = None) -> "Jet":
        """Same coefficients, relabelled spaces (dimensions must agree)."""
        src = source or self.source
        tgt = target or self.target
        _same_dim(src, self.source, "retarget source")
        _same_dim(tgt, self.target, "retarget target")
        comps = [HomogeneousPoly._raw(src, tgt, c.degree, c.coeffs) for c in self.components]
        return Jet(src, tgt, comps, self.valid_order, self.polynomial)

    def terms(self):
        """Iterate ``(degree, mono, coord, value)`` in canonical order."""
        for m, comp in enumerate(self.components):
            for mono in sorted(comp.coeffs, reverse=True):
                vec = comp.coeffs[mono]
                for k, c in enumerate(vec):
                    if c:
                        yield m, mono, k, c

    # arithmetic -----------------------------------------------------------

    def _binary(self, other: "Jet", op) -> "Jet":
        _same_dim(self.source, other.source, "jet sources")
        _same_dim(self.target, other.target, "jet targets")
        order = _common_order(self, other)
        comps = [op(self.component(m), other.component(m)) for m in range(order + 1)]
        valid = min(vorder(self), vorder(other), order)
        return Jet(self.source, self.target, comps, valid, self.polynomial and other.polynomial)

    def __add__(self, other):
        return self._binary(other, HomogeneousPoly.__add__)

    def __sub__(self, other):
        return self._binary(other, HomogeneousPoly.__sub__)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "Jet":
        return Jet(self.source, self.target, [p.scale(c) for p in self.components],
                   self.valid_order, self.polynomial)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return (self.order == other.order and self.valid_order == other.valid_order
                and self.source.dim == other.source.dim and self.target.dim == other.target.dim
                and self.components == other.components)

    def agrees_with(self, other: "Jet", up_to: int | None = None) -> bool:
        """Componentwise equality in every degree both jets trust (or up to ``up_to``)."""
        top = _joint_top(self, other, up_to)
        return all(self.component(m) == other.component(m) for m in range(top + 1))

    def first_difference(self, other: "Jet", up_to: int | None = None):
        top = _joint_top(self, other, up_to)
        for m in range(top + 1):
            d = self.component(m) - other.component(m)
            if not d.is_zero():
                return m, d
        return None

    def __repr__(self):
        return (f"Jet({self.source.name}->{self.target.name}, order={self.order}, "
                f"valid={self.valid_order}{', poly' if self.polynomial else ''})")

    def __str__(self):
        return pretty(self)


def vorder(j: Jet):
    """Trusted order, infinite for polynomial jets."""
    return math.inf if j.polynomial else j.valid_order


def _eff_valid(j: Jet) -> int:
    # a polynomial jet is exact in every degree it stores
    return j.order if j.polynomial else j.valid_order


def _joint_top(a: Jet, b: Jet, up_to=None) -> int:
    if a.polynomial and b.polynomial:
        top = max(a.order, b.order)
    elif a.polynomial:
        top = b.valid_order
    elif b.polynomial:
        top = a.valid_order
    else:
        top = min(a.valid_order, b.valid_order)
    return top if up_to is None else min(top, up_to)


def _common_order(a: Jet, b: Jet) -> int:
    if a.polynomial and b.polynomial:
        return max(a.order, b.order)
    if a.polynomial:
        return b.order
    if b.polynomial:
        return a.order
    return min(a.order, b.order)


def eval_jet(f: Jet, x, up_to: int) -> tuple:
    """Partial sum of the components of degree <= ``up_to`` at the point ``x``."""
    if up_to > vorder(f):
        raise TruncationError(f"up_to={up_to} exceeds valid order {f.valid_order}")
    coords = x.coords if isinstance(x, Vec) else tuple(Fraction(c) for c in x)
    if len(coords) != f.source.dim:
        raise DimensionError("evaluation point has the wrong dimension")
    out = (ZERO,) * f.target.dim
    for m in range(min(up_to, f.order) + 1):
        out = vadd(out, f.components[m](coords))
    return out


@dataclass(frozen=True)
class LinearMap:
    source: SpaceDesc
    target: SpaceDesc
    matrix: tuple  # dim(target) rows of dim(source) entries

    def __post_init__(self):
        rows = tuple(tuple(Fraction(c) for c in r) for r in self.matrix)
        if len(rows) != self.target.dim or any(len(r) != self.source.dim for r in rows):
            raise DimensionError(
                f"matrix shape does not match {self.target.dim}x{self.source.dim}")
        object.__setattr__(self, "matrix", rows)

    @classmethod
    def identity(cls, space):
        n = space.dim
        return cls(space, space, tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, source, target):
        return cls(source, target, ((ZERO,) * source.dim,) * target.dim)

    def __call__(self, v) -> tuple:
        coords = v.coords if isinstance(v, Vec) else tuple(v)
        if len(coords) != self.source.dim:
            raise DimensionError("vector does not live in the source space")
        return tuple(sum((a * b for a, b in zip(row, coords) if a and b), ZERO) for row in self.matrix)

    def compose(self, inner: "LinearMap") -> "LinearMap":
        """``self ∘ inner``."""
        _same_dim(inner.target, self.source, "composition")
        cols = [inner(tuple(ONE if k == j else ZERO for k in range(inner.source.dim)))
                for j in range(inner.source.dim)]
        return LinearMap(inner.source, self.target,
                         tuple(tuple(self(col)[i] for col in cols) for i in range(self.target.dim)))

    def __sub__(self, other):
        return LinearMap(self.source, self.target,
                         tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.matrix, other.matrix)))

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.matrix)

    def as_jet(self, order: int) -> Jet:
        terms = []
        for i in range(self.target.dim):
            for j in range(self.source.dim):
                if self.matrix[i][j]:
                    terms.append((tuple(1 if k == j else 0 for k in range(self.source.dim)), i,
                                  self.matrix[i][j]))
        return Jet.from_terms(self.source, self.target, order, terms, polynomial=True)


# ---------------------------------------------------------------------------
# dense multilinear maps (oracle / interchange format)


class DenseMultilinear:
    """m-linear map E^m -> F as a dense tensor of shape (dim E,)*m + (dim F,)."""

    def __init__(self, source: SpaceDesc, target: SpaceDesc, arity: int, tensor=None):
        self.source, self.target, self.arity = source, target, arity
        shape = (source.dim,) * arity + (target.dim,)
        if tensor is None:
            tensor = np.full(shape, ZERO, dtype=object)
        else:
            tensor = np.array(tensor, dtype=object)
            if tensor.shape != shape:
                raise DimensionError(f"tensor shape {tensor.shape} != {shape}")
            tensor = np.vectorize(Fraction, otypes=[object])(tensor)
        self.tensor = tensor

    def __call__(self, *vecs) -> tuple:
        if len(vecs) != self.arity:
            raise ValueError(f"expected {self.arity} arguments")
        t = self.tensor
        for v in vecs:
            coords = np.array([Fraction(c) for c in (v.coords if isinstance(v, Vec) else v)], dtype=object)
            t = np.tensordot(coords, t, axes=(0, 0))
        return tuple(Fraction(c) for c in np.atleast_1d(t))

    def __eq__(self, other):
        if not isinstance(other, DenseMultilinear):
            return NotImplemented
        return (self.arity == other.arity and self.tensor.shape == other.tensor.shape
                and bool(np.all(self.tensor == other.tensor)))

    def __add__(self, other):
        return DenseMultilinear(self.source, self.target, self.arity, self.tensor + other.tensor)

    def is_symmetric(self) -> bool:
        for i in range(self.arity - 1):
            axes = list(range(self.arity + 1))
            axes[i], axes[i + 1] = axes[i + 1], axes[i]
            if not np.all(np.transpose(self.tensor, axes) == self.tensor):
                return False
        return True


def from_multilinear(u: DenseMultilinear) -> HomogeneousPoly:
    """The homogeneous polynomial x -> u(x, ..., x)."""
    n = u.source.dim
    acc = defaultdict(lambda: [ZERO] * u.target.dim)
    for idx in itertools.product(range(n), repeat=u.arity):
        entries = u.tensor[idx]
        if not any(entries):
            continue
        mono = [0] * n
        for i in idx:
            mono[i] += 1
        slot = acc[tuple(mono)]
        for k, c in enumerate(entries):
            slot[k] += c
    return HomogeneousPoly(u.source, u.target, u.arity, {m: tuple(v) for m, v in acc.items()})


def polarize(f: HomogeneousPoly) -> DenseMultilinear:
    """Symmetric multilinear map determining ``f``, by the inclusion-exclusion
    polarization formula evaluated on sums of basis vectors."""
    m, n = f.degree, f.source.dim
    u = DenseMultilinear(f.source, f.target, m)
    if m == 0:
        u.tensor[...] = np.array(f((ZERO,) * n) if n else (), dtype=object)
        return u
    inv = Fraction(1, math.factorial(m))
    for idx in itertools.combinations_with_replacement(range(n), m):
        total = [ZERO] * f.target.dim
        for size in range(1, m + 1):
            sign = -1 if (m - size) % 2 else 1
            for subset in itertools.combinations(idx, size):
                point = [ZERO] * n
                for i in subset:
                    point[i] += 1
                val = f(point)
                for k, c in enumerate(val):
                    total[k] += sign * c
        value = np.array([inv * c for c in total], dtype=object)
        for perm in set(itertools.permutations(idx)):
            u.tensor[perm] = value
    return u


def symmetrize(u: DenseMultilinear) -> DenseMultilinear:
    m = u.arity
    total = np.full(u.tensor.shape, ZERO, dtype=object)
    for perm in itertools.permutations(range(m)):
        total = total + np.transpose(u.tensor, perm + (m,))
    inv = Fraction(1, math.factorial(m))
    return DenseMultilinear(u.source, u.target, m, total * inv)


def p_symmetrized(u: DenseMultilinear, z: Sequence, p: Sequence[int]) -> tuple:
    """Sum of u(z_{s(1)}, ..., z_{s(m)}) over all arrangements using index j exactly p_j times."""
    from sympy.utilities.iterables import multiset_permutations

    if len(z) != len(p):
        raise ValueError("z and p must have the same length")
    if any(pj < 0 for pj in p) or sum(p) != u.arity:
        return (ZERO,) * u.target.dim
    slots = [j for j, pj in enumerate(p) for _ in range(pj)]
    total = (ZERO,) * u.target.dim
    for arrangement in multiset_permutations(slots):
        total = vadd(total, u(*(z[j] for j in arrangement)))
    return total


# ---------------------------------------------------------------------------
# scalar polynomial helpers (mono -> Fraction), truncated by total degree


def _smul(p: dict, q: dict, max_deg: int) -> dict:
    out = defaultdict(Fraction)
    for m1, c1 in p.items():
        d1 = sum(m1)
        for m2, c2 in q.items():
            if d1 + sum(m2) <= max_deg:
                out[mono_add(m1, m2)] += c1 * c2
    return {m: c for m, c in out.items() if c}


class _PowerCache:
    def __init__(self, series: list, dim: int, max_deg: int):
        self.series, self.max_deg = series, max_deg
        self.one = {(0,) * dim: ONE}
        self.cache = {}

    def power(self, i: int, k: int) -> dict:
        if k == 0:
            return self.one
        key = (i, k)
        if key not in self.cache:
            self.cache[key] = _smul(self.power(i, k - 1), self.series[i], self.max_deg)
        return self.cache[key]

    def monomial(self, alpha) -> dict:
        out = self.one
        for i, a in enumerate(alpha):
            if a:
                out = _smul(out, self.power(i, a), self.max_deg)
        return out


def _compose_monomials(g_components, f_coord_series, src: SpaceDesc, tgt: SpaceDesc, order: int):
    cache = _PowerCache(f_coord_series, src.dim, order)
    buckets = [defaultdict(lambda: [ZERO] * tgt.dim) for _ in range(order + 1)]
    for comp in g_components:
        for alpha, vec in comp.coeffs.items():
            for mono, c in cache.monomial(alpha).items():
                slot = buckets[sum(mono)][mono]
                for k, v in enumerate(vec):
                    if v:
                        slot[k] += c * v
    return [HomogeneousPoly(src, tgt, m, {k: tuple(v) for k, v in b.items()})
            for m, b in enumerate(buckets)]


def substitute(g: Jet, f: Jet) -> Jet:
    """The composite g∘f of ``g: E -> F`` and ``f: X -> E``.

    Allowed when ``f`` has no constant term, or when ``g`` is a polynomial.
    """
    _same_dim(g.source, f.target, "substitute")
    f0_zero = not f.has_constant_term()
    if not f0_zero and not g.polynomial:
        raise NotSummableError(
            "g is a proper series and f has a nonzero constant term: the family is not summable")
    if g.polynomial and f.polynomial:
        order = max(f.order, max(g.degree(), 0) * max(f.degree(), 1))
        f = f.truncate(order)
        valid = order
        g_comps = list(g.components)
    elif f0_zero:
        if g.polynomial:
            order = f.order
        elif f.polynomial:
            order = g.order
            f = f.truncate(order)
        else:
            order = min(g.order, f.order)
        valid = min(vorder(g), vorder(f))
        g_comps = [g.component(m) for m in range(min(order, g.order) + 1)]
    else:
        order, valid = f.order, vorder(f)
        g_comps = list(g.components)
    series = [{} for _ in range(f.target.dim)]
    for m in range(min(order, f.order) + 1):
        for mono, vec in f.components[m].coeffs.items():
            for i, c in enumerate(vec):
                if c:
                    series[i][mono] = c
    comps = _compose_monomials(g_comps, series, f.source, g.target, order)
    return Jet(f.source, g.target, comps, min(valid, order), g.polynomial and f.polynomial)


def precompose_linear(f: Jet, p: LinearMap) -> Jet:
    """f∘p for a linear map p: Y -> X; preserves degrees."""
    _same_dim(p.target, f.source, "precompose")
    forms = [{tuple(1 if k == j else 0 for k in range(p.source.dim)): row[j]
              for j in range(p.source.dim) if row[j]} for row in p.matrix]
    comps = []
    for comp in f.components:
        cache = _PowerCache(forms, p.source.dim, comp.degree)
        acc = defaultdict(lambda: [ZERO] * f.target.dim)
        for alpha, vec in comp.coeffs.items():
            for mono, c in cache.monomial(alpha).items():
                slot = acc[mono]
                for k, v in enumerate(vec):
                    if v:
                        slot[k] += c * v
        comps.append(HomogeneousPoly(p.source, f.target, comp.degree, {m: tuple(v) for m, v in acc.items()}))
    return Jet(p.source, f.target, comps, f.valid_order, f.polynomial)


def postcompose_linear(f: Jet, s: LinearMap) -> Jet:
    """s∘f for a linear map s: E -> F."""
    _same_dim(s.source, f.target, "postcompose")
    comps = [c.map_values(s.matrix, s.target) for c in f.components]
    return Jet(f.source, s.target, comps, f.valid_order, f.polynomial)


# ---------------------------------------------------------------------------
# double series: F[[X×Y]] ≅ (F[[X]])[[Y]]


class CurriedJet:
    """A series in y whose coefficients are jets in x.

    ``coeffs[beta]`` is the jet multiplying y^beta; it has order
    ``order - |beta|`` so that total degrees never exceed ``order``.
    """

    def __init__(self, outer: SpaceDesc, inner: SpaceDesc, target: SpaceDesc, order: int,
                 coeffs: Mapping, valid_order: int | None = None, polynomial: bool = False):
        self.outer, self.inner, self.target, self.order = outer, inner, target, order
        self.valid_order = order if valid_order is None else valid_order
        self.polynomial = polynomial
        clean = {}
        for beta, jet in coeffs.items():
            beta = tuple(beta)
            if len(beta) != outer.dim:
                raise DimensionError("outer monomial has the wrong length")
            b = sum(beta)
            if b > order:
                continue
            _same_dim(jet.source, inner, "inner source")
            _same_dim(jet.target, target, "inner target")
            jet = jet.truncate(order - b) if jet.order != order - b else jet
            if not jet.is_zero():
                clean[beta] = jet
        self.coeffs = clean

    def inner_jet(self, beta) -> Jet:
        b = sum(beta)
        jet = self.coeffs.get(tuple(beta))
        if jet is None:
            return Jet.zero(self.inner, self.target, self.order - b,
                            max(self.valid_order - b, -1), polynomial=self.polynomial)
        return jet

    def at(self, y) -> Jet:
        """The jet x -> f(x, y) obtained by evaluating the outer variable."""
        yc = y.coords if isinstance(y, Vec) else tuple(Fraction(c) for c in y)
        total = Jet.zero(self.inner, self.target, self.order, polynomial=True)
        for beta, jet in self.coeffs.items():
            w = monomial_eval(beta, yc)
            if w:
                total = total + _pad(jet, self.order).scale(w)
        return total

    def __eq__(self, other):
        if not isinstance(other, CurriedJet):
            return NotImplemented
        return (self.order == other.order and self.valid_order == other.valid_order
                and set(self.coeffs) == set(other.coeffs)
                and all(self.coeffs[b].components == other.coeffs[b].components for b in self.coeffs))


def _pad(jet: Jet, order: int) -> Jet:
    comps = list(jet.components) + [HomogeneousPoly.zero(jet.source, jet.target, m)
                                    for m in range(jet.order + 1, order + 1)]
    return Jet(jet.source, jet.target, comps, jet.order, True)


def curry(f: Jet, outer: SpaceDesc | None = None, inner: SpaceDesc | None = None) -> CurriedJet:
    """Split a jet on X×Y into a series in y with jet-in-x coefficients."""
    if f.source.split is None:
        raise DimensionError(f"{f.source.name} is not a product space")
    X, Y = f.source.factors()
    X, Y = inner or X, outer or Y
    nx = f.source.split
    N, V = f.order, _eff_valid(f)
    parts = defaultdict(lambda: defaultdict(lambda: [ZERO] * f.target.dim))
    for comp in f.components:
        for mono, vec in comp.coeffs.items():
            alpha, beta = mono[:nx], mono[nx:]
            slot = parts[beta][alpha]
            for k, c in enumerate(vec):
                slot[k] += c
    coeffs = {}
    for beta, table in parts.items():
        b = sum(beta)
        coeffs[beta] = Jet.from_terms(X, f.target, N - b, {a: tuple(v) for a, v in table.items()},
                                      valid_order=max(min(V - b, N - b), -1), polynomial=f.polynomial)
    return CurriedJet(Y, X, f.target, N, coeffs, valid_order=min(f.valid_order, N), polynomial=f.polynomial)


def uncurry(cf: CurriedJet, source: SpaceDesc | None = None) -> Jet:
    Z = source or product_space(cf.inner, cf.outer)
    if Z.split != cf.inner.dim:
        raise DimensionError("product space split does not match the inner space")
    acc = {}
    for beta, jet in cf.coeffs.items():
        for comp in jet.components:
            for alpha, vec in comp.coeffs.items():
                key = alpha + beta
                if key in acc:
                    acc[key] = vadd(acc[key], vec)
                else:
                    acc[key] = vec
    valid = cf.valid_order
    for beta, jet in cf.coeffs.items():
        if not jet.polynomial:
            valid = min(valid, jet.valid_order + sum(beta))
    return Jet.from_terms(Z, cf.target, cf.order, acc, valid_order=min(valid, cf.order),
                          polynomial=cf.polynomial)


# ---------------------------------------------------------------------------
# serialization


def jet_to_json(f: Jet) -> dict:
    out = {
        "source": list(f.source.basis_labels),
        "target": list(f.target.basis_labels),
        "order": f.order,
        "valid_order": f.valid_order,
        "terms": [{"deg": m, "mono": list(mono), "coord": k, "c": format_rational(c)}
                  for m, mono, k, c in f.terms()],
    }
    if f.source.split is not None:
        out["split"] = f.source.split
    if f.polynomial:
        out["polynomial"] = True
    return out


def jet_from_json(obj: Mapping, source: SpaceDesc | None = None, target: SpaceDesc | None = None) -> Jet:
    try:
        src_labels = obj["source"]
        tgt_labels = obj["target"]
        order = int(obj["order"])
        valid = int(obj.get("valid_order", order))
        terms_in = obj.get("terms", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed jet: missing or invalid field {exc}") from None
    split = obj.get("split")
    src = source or SpaceDesc("X", tuple(src_labels), split=split)
    tgt = target or SpaceDesc("F", tuple(tgt_labels))
    if src.dim != len(src_labels) or tgt.dim != len(tgt_labels):
        raise ValueError("jet labels do not match the expected spaces")
    terms = []
    for t in terms_in:
        try:
            mono = tuple(int(e) for e in t["mono"])
            deg, coord = int(t["deg"]), int(t["coord"])
            c = parse_rational(t["c"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed jet term {t!r}: {exc}") from None
        if sum(mono) != deg or len(mono) != src.dim or not 0 <= coord < tgt.dim:
            raise ValueError(f"inconsistent jet term {t!r}")
        terms.append((mono, coord, c))
    return Jet.from_terms(src, tgt, order, terms, valid_order=valid, polynomial=bool(obj.get("polynomial")))


def _format_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"({format_rational(c)})"


def _format_mono(mono, labels) -> str:
    parts = []
    for e, lab in zip(mono, labels):
        if e == 1:
            parts.append(lab)
        elif e:
            parts.append(f"{lab}^{e}")
    return "·".join(parts) if parts else "1"


def pretty(f: Jet) -> str:
    lines = []
    for m, comp in enumerate(f.components):
        pieces = []
        for mono in sorted(comp.coeffs, reverse=True):
            for k, c in enumerate(comp.coeffs[mono]):
                if c:
                    pieces.append(f"{_format_coeff(c)}·{_format_mono(mono, f.source.basis_labels)}"
                                  f" ⊗ {f.target.basis_labels[k]}")
        flag = "" if m <= f.valid_order or f.polynomial else "  [untrusted]"
        lines.append(f"deg {m}: {' + '.join(pieces) if pieces else '0'}{flag}")
    return "\n".join(lines)
