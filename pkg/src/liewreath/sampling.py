"""Seeded random jets and vectors with small rational coefficients."""
from __future__ import annotations

import random
from fractions import Fraction

from .polyjet import Jet
from .spaces import SpaceDesc, multiindex_enumerate


def random_rational(rng: random.Random, span: int = 5, den: int = 3) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, den))


def random_vector(rng: random.Random, n: int, span: int = 5, den: int = 3) -> tuple:
    return tuple(random_rational(rng, span, den) for _ in range(n))


def random_poly_jet(rng: random.Random, source: SpaceDesc, target: SpaceDesc, max_deg: int,
                    density: float = 0.5, min_deg: int = 0, span: int = 4, den: int = 3) -> Jet:
    """A polynomial jet with random support of degree between ``min_deg`` and ``max_deg``."""
    terms = []
    for d in range(min_deg, max_deg + 1):
        for mono in multiindex_enumerate(source.dim, d):
            for k in range(target.dim):
                if rng.random() < density:
                    c = random_rational(rng, span, den)
                    if c:
                        terms.append((mono, k, c))
    return Jet.from_terms(source, target, max_deg, terms, polynomial=True)
