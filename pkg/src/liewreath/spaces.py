"""Exact scalars, finite-dimensional spaces with named bases, multi-indices.

The scalar field is the rationals, realized by :class:`fractions.Fraction`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

Rational = Fraction
ZERO = Fraction(0)
ONE = Fraction(1)

MultiIndex = tuple  # tuple[int, ...]


class DimensionError(ValueError):
    """Raised when objects living in incompatible spaces are combined."""


def parse_rational(s) -> Fraction:
    """Parse ``"p/q"``, ``"p"``, an int or a Fraction into an exact rational."""
    if isinstance(s, Fraction):
        return s
    if isinstance(s, bool):
        raise ValueError(f"not a rational: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        text = s.strip()
        if not text or any(c in text for c in ".eE"):
            raise ValueError(f"not a rational: {s!r}")
        return Fraction(text)
    raise ValueError(f"not a rational: {s!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class SpaceDesc:
    """A vector space with an explicit basis.

    ``split`` is set on product spaces X×Y: the first ``split`` basis vectors
    belong to X, the rest to Y.
    """

    name: str
    basis_labels: tuple
    split: int | None = None

    def __post_init__(self):
        labels = tuple(str(l) for l in self.basis_labels)
        object.__setattr__(self, "basis_labels", labels)
        if not labels:
            raise ValueError(f"space {self.name!r} must have dim >= 1")
        if len(set(labels)) != len(labels):
            raise ValueError(f"space {self.name!r} has repeated basis labels")
        if self.split is not None and not 0 < self.split < len(labels):
            raise ValueError("split point must leave both factors nonempty")

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    @classmethod
    def standard(cls, name: str, dim: int, prefix: str | None = None) -> "SpaceDesc":
        prefix = name.lower() if prefix is None else prefix
        return cls(name, tuple(f"{prefix}{i}" for i in range(dim)))

    def index(self, label: str) -> int:
        try:
            return self.basis_labels.index(label)
        except ValueError:
            raise KeyError(f"{label!r} is not a basis label of {self.name}") from None

    def factors(self) -> tuple["SpaceDesc", "SpaceDesc"]:
        if self.split is None:
            raise DimensionError(f"{self.name} is not a product space")
        left, right = self.name.split("×", 1) if "×" in self.name else (self.name + "_0", self.name + "_1")
        return (SpaceDesc(left, self.basis_labels[: self.split]),
                SpaceDesc(right, self.basis_labels[self.split:]))


def product_space(X: SpaceDesc, Y: SpaceDesc) -> SpaceDesc:
    labels = X.basis_labels + Y.basis_labels
    if len(set(labels)) != len(labels):
        # keep labels distinct by tagging the second factor
        labels = X.basis_labels + tuple(l + "'" for l in Y.basis_labels)
    return SpaceDesc(f"{X.name}×{Y.name}", labels, split=X.dim)


@dataclass(frozen=True)
class Vec:
    space: SpaceDesc
    coords: tuple

    def __post_init__(self):
        coords = tuple(Fraction(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) != self.space.dim:
            raise DimensionError(
                f"{len(coords)} coordinates given for {self.space.name} of dim {self.space.dim}")

    @classmethod
    def zero(cls, space: SpaceDesc) -> "Vec":
        return cls(space, (ZERO,) * space.dim)

    @classmethod
    def basis(cls, space: SpaceDesc, i: int) -> "Vec":
        return cls(space, tuple(ONE if k == i else ZERO for k in range(space.dim)))

    def _check(self, other: "Vec"):
        if other.space.dim != self.space.dim:
            raise DimensionError(f"cannot combine vectors of {self.space.name} and {other.space.name}")

    def __add__(self, other: "Vec") -> "Vec":
        self._check(other)
        return Vec(self.space, vadd(self.coords, other.coords))

    def __sub__(self, other: "Vec") -> "Vec":
        self._check(other)
        return Vec(self.space, vsub(self.coords, other.coords))

    def __neg__(self) -> "Vec":
        return Vec(self.space, tuple(-c for c in self.coords))

    def __mul__(self, scalar) -> "Vec":
        return Vec(self.space, vscale(Fraction(scalar), self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __iter__(self):
        return iter(self.coords)


# coordinate-tuple helpers used throughout the series code

def vadd(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def vscale(c, a: Sequence) -> tuple:
    return tuple(c * x for x in a)


def is_zero_vec(a: Iterable) -> bool:
    return not any(a)


def multiindex_enumerate(dim: int, degree: int) -> list:
    """All exponent tuples of length ``dim`` summing to ``degree``, reverse-lex order.

    >>> multiindex_enumerate(2, 2)
    [(2, 0), (1, 1), (0, 2)]
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if degree < 0:
        return []
    if dim == 1:
        return [(degree,)]
    out = []
    for first in range(degree, -1, -1):
        for rest in multiindex_enumerate(dim - 1, degree - first):
            out.append((first,) + rest)
    return out


def count_multiindices(dim: int, degree: int) -> int:
    return comb(degree + dim - 1, dim - 1)


def monomial_eval(alpha: Sequence[int], x) -> Fraction:
    coords = x.coords if isinstance(x, Vec) else tuple(x)
    if len(alpha) != len(coords):
        raise DimensionError(f"multi-index of length {len(alpha)} vs point of dim {len(coords)}")
    out = ONE
    for a, c in zip(alpha, coords):
        if a:
            out *= Fraction(c) ** a
    return out


def mono_add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def unit_mono(dim: int, i: int) -> tuple:
    return tuple(1 if k == i else 0 for k in range(dim))


def matrix_rank(rows: Sequence[Sequence]) -> int:
    import sympy

    if not rows or not len(rows[0]):
        return 0
    return sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) for c in map(Fraction, r)]
                         for r in rows]).rank()


def solve_columns(columns: Sequence[Sequence], target: Sequence):
    """Coordinates of ``target`` in the span of ``columns``, or None if outside it."""
    import sympy

    n = len(target)
    A = sympy.Matrix(n, len(columns), lambda i, j: _sym(columns[j][i]))
    b = sympy.Matrix(n, 1, lambda i, j: _sym(target[i]))
    try:
        sol, params = A.gauss_jordan_solve(b)
    except ValueError:
        return None
    sol = sol.subs({t: 0 for t in params})
    return tuple(Fraction(int(v.p), int(v.q)) for v in sol)


def _sym(c):
    import sympy

    c = Fraction(c)
    return sympy.Rational(c.numerator, c.denominator)
