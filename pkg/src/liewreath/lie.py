"""Finite-dimensional Lie algebras given by structure constants."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .polyjet import HomogeneousPoly, LinearMap
from .spaces import ZERO, DimensionError, SpaceDesc, Vec, format_rational, parse_rational


class LieValidationError(ValueError):
    """A structure table violating antisymmetry or the Jacobi identity.

    ``kind`` is ``"antisymmetry"`` or ``"jacobi"``; ``indices`` the offending
    basis indices (1-based) and ``defect`` the nonzero defect vector.
    """

    def __init__(self, kind: str, indices: tuple, defect: tuple, labels=None):
        self.kind, self.indices, self.defect = kind, indices, defect
        names = indices if labels is None else tuple(labels[i - 1] for i in indices)
        super().__init__(f"{kind} violated at {indices} {names}: defect "
                         f"[{', '.join(format_rational(c) for c in defect)}]")


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    space: SpaceDesc
    table: tuple  # table[i][j] = coordinates of [e_i, e_j]
    name: str = ""

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def labels(self):
        return self.space.basis_labels

    def bracket(self, a, b) -> tuple:
        """Bilinear extension of the structure table."""
        a = _coords(a, self.dim)
        b = _coords(b, self.dim)
        out = [ZERO] * self.dim
        for i, ai in enumerate(a):
            if not ai:
                continue
            row = self.table[i]
            for j, bj in enumerate(b):
                if not bj:
                    continue
                w = ai * bj
                for k, c in enumerate(row[j]):
                    if c:
                        out[k] += w * c
        return tuple(out)

    def bracket_vec(self, a: Vec, b: Vec) -> Vec:
        return Vec(self.space, self.bracket(a, b))

    def ad(self, y) -> LinearMap:
        """Matrix of b -> [y, b]."""
        y = _coords(y, self.dim)
        cols = [self.bracket(y, _unit(self.dim, j)) for j in range(self.dim)]
        return LinearMap(self.space, self.space,
                         tuple(tuple(cols[j][i] for j in range(self.dim)) for i in range(self.dim)))

    def ad_basis(self) -> list:
        return [self.ad(_unit(self.dim, i)) for i in range(self.dim)]

    def is_abelian(self) -> bool:
        return not any(any(v) for row in self.table for v in row)

    def element(self, spec) -> tuple:
        """Coordinates from a basis label, a coordinate sequence or a Vec."""
        if isinstance(spec, str):
            if spec in self.labels:
                return _unit(self.dim, self.space.index(spec))
            parts = [p for p in spec.replace(" ", "").split(",") if p]
            return _coords([parse_rational(p) for p in parts], self.dim)
        return _coords(spec, self.dim)

    def __eq__(self, other):
        return isinstance(other, LieAlgebra) and self.dim == other.dim and self.table == other.table

    def __hash__(self):
        return hash(self.table)

    def __repr__(self):
        return f"LieAlgebra({self.name or self.space.name}, dim={self.dim})"


def _unit(n, i):
    return tuple(Fraction(1) if k == i else ZERO for k in range(n))


def _coords(v, n) -> tuple:
    coords = v.coords if isinstance(v, Vec) else tuple(Fraction(c) for c in v)
    if len(coords) != n:
        raise DimensionError(f"expected {n} coordinates, got {len(coords)}")
    return coords


def validate_lie(space: SpaceDesc, table: Sequence, name: str = "") -> LieAlgebra:
    """Check antisymmetry and Jacobi on all basis pairs/triples.

    Raises :class:`LieValidationError` naming the first violation.
    """
    n = space.dim
    if len(table) != n or any(len(row) != n for row in table):
        raise DimensionError("structure table must be dim x dim")
    tab = tuple(tuple(_coords(v, n) for v in row) for row in table)
    for i in range(n):
        if any(tab[i][i]):
            raise LieValidationError("antisymmetry", (i + 1, i + 1), tab[i][i], space.basis_labels)
        for j in range(i + 1, n):
            defect = tuple(a + b for a, b in zip(tab[i][j], tab[j][i]))
            if any(defect):
                raise LieValidationError("antisymmetry", (i + 1, j + 1), defect, space.basis_labels)
    L = LieAlgebra(space, tab, name)
    for i, j, k in itertools.combinations(range(n), 3):
        ei, ej, ek = _unit(n, i), _unit(n, j), _unit(n, k)
        t1 = L.bracket(ei, tab[j][k])
        t2 = L.bracket(ej, tab[k][i])
        t3 = L.bracket(ek, tab[i][j])
        defect = tuple(a + b + c for a, b, c in zip(t1, t2, t3))
        if any(defect):
            raise LieValidationError("jacobi", (i + 1, j + 1, k + 1), defect, space.basis_labels)
    return L


def from_brackets(name: str, labels: Sequence[str], brackets: Mapping) -> LieAlgebra:
    """Build from ``{(i, j): coords}`` for i < j (0-based), completing antisymmetrically."""
    n = len(labels)
    space = SpaceDesc(name, tuple(labels))
    table = [[(ZERO,) * n for _ in range(n)] for _ in range(n)]
    for (i, j), v in brackets.items():
        v = _coords(v, n)
        table[i][j] = v
        if i != j:
            table[j][i] = tuple(-c for c in v)
    return validate_lie(space, table, name)


def abelian(dim: int, name: str | None = None, prefix: str = "e") -> LieAlgebra:
    name = name or f"abelian_{dim}"
    return from_brackets(name, [f"{prefix}{i + 1}" for i in range(dim)], {})


def nilpotency_bound(L: LieAlgebra):
    """Smallest k with every k-fold composite of basis adjoints zero, or None.

    By multilinearity this certifies (ad y)^k = 0 for all y.
    """
    return composite_nilpotency([a.matrix for a in L.ad_basis()], L.dim + 1)


def composite_nilpotency(mats, max_k: int):
    """Smallest k <= max_k such that all products M_{i1}...M_{ik} vanish, else None."""
    n = len(mats[0]) if mats else 0
    current = [_identity(n)]
    for k in range(1, max_k + 1):
        nxt = []
        seen = set()
        for M in current:
            for A in mats:
                P = _matmul(A, M)
                if any(any(r) for r in P) and P not in seen:
                    seen.add(P)
                    nxt.append(P)
        if not nxt:
            return k
        # composites of a spanning set span the next level
        current = _reduce_span(nxt)
    return None


def _identity(n):
    return tuple(tuple(Fraction(1) if i == j else ZERO for j in range(n)) for i in range(n))


def _matmul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    return tuple(tuple(sum((A[i][k] * B[k][j] for k in range(m) if A[i][k] and B[k][j]), ZERO)
                       for j in range(p)) for i in range(n))


def _reduce_span(mats):
    from .spaces import matrix_rank

    basis, rows = [], []
    for M in mats:
        flat = [c for r in M for c in r]
        if matrix_rank(rows + [flat]) > len(rows):
            rows.append(flat)
            basis.append(M)
    return basis


# ---------------------------------------------------------------------------
# JSON


def lie_to_json(L: LieAlgebra) -> dict:
    brackets = []
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            v = L.table[i][j]
            if any(v):
                brackets.append({"i": i, "j": j,
                                 "v": {L.labels[k]: format_rational(c) for k, c in enumerate(v) if c}})
    return {"name": L.name, "basis": list(L.labels), "brackets": brackets}


def lie_from_json(obj: Mapping) -> LieAlgebra:
    try:
        name = str(obj.get("name", ""))
        labels = [str(l) for l in obj["basis"]]
        entries = obj.get("brackets", [])
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed Lie algebra: missing field {exc}") from None
    n = len(labels)
    brackets = {}
    for e in entries:
        try:
            i, j = int(e["i"]), int(e["j"])
            raw = e["v"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed bracket entry {e!r}: {exc}") from None
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"bracket indices out of range in {e!r}")
        v = [ZERO] * n
        items = raw.items() if isinstance(raw, Mapping) else enumerate(raw)
        for k, c in items:
            idx = labels.index(k) if isinstance(k, str) and k in labels else int(k)
            v[idx] = parse_rational(c)
        if i > j:
            i, j, v = j, i, [-c for c in v]
        brackets[(i, j)] = tuple(v)
    space = SpaceDesc(name or "L", tuple(labels))
    table = [[(ZERO,) * n for _ in range(n)] for _ in range(n)]
    for (i, j), v in brackets.items():
        table[i][j] = v
        if i != j:
            table[j][i] = tuple(-c for c in v)
    # i == j entries are kept as given so that validation reports them
    return validate_lie(space, table, name)


FIXTURES = ("abelian_1", "abelian_2", "abelian_r", "heisenberg_3", "sl2", "solvable_2")


def load_fixture_json(name: str) -> dict:
    ref = resources.files("liewreath") / "fixtures" / f"{name}.json"
    return json.loads(ref.read_text())


def load_lie(ref) -> LieAlgebra:
    """Load from a JSON file path, a shipped fixture name, or an already-parsed dict."""
    if isinstance(ref, LieAlgebra):
        return ref
    if isinstance(ref, Mapping):
        return lie_from_json(ref)
    path = Path(ref)
    if path.exists():
        return lie_from_json(json.loads(path.read_text()))
    stem = path.stem if path.suffix == ".json" else str(ref)
    try:
        return lie_from_json(load_fixture_json(stem))
    except FileNotFoundError:
        raise FileNotFoundError(f"no Lie algebra file or fixture named {ref!r}") from None


def symbolic_ad_apply(L: LieAlgebra, mats, poly: HomogeneousPoly) -> HomogeneousPoly:
    """Apply the operator y -> Σ_i y_i M_i (linear in y) to a polynomial in y.

    ``mats[i]`` is a matrix acting on the values of ``poly``; the result has
    degree one higher. With ``M_i = ad(e_i)`` this multiplies by ad(y).
    """
    out = {}
    for mono, vec in poly.coeffs.items():
        for i, M in enumerate(mats):
            new = tuple(sum((r[j] * vec[j] for j in range(len(vec)) if r[j] and vec[j]), ZERO) for r in M)
            if not any(new):
                continue
            key = mono[:i] + (mono[i] + 1,) + mono[i + 1:]
            if key in out:
                s = tuple(a + b for a, b in zip(out[key], new))
                if any(s):
                    out[key] = s
                else:
                    del out[key]
            else:
                out[key] = new
    return HomogeneousPoly._raw(poly.source, poly.target, poly.degree + 1, out)
