import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from liewreath.lie import (
    FIXTURES,
    LieValidationError,
    abelian,
    from_brackets,
    lie_from_json,
    lie_to_json,
    load_lie,
    nilpotency_bound,
    validate_lie,
)
from liewreath.sampling import random_vector
from liewreath.spaces import SpaceDesc


def test_fixtures_validate():
    for name in FIXTURES:
        L = load_lie(name)
        assert L.dim == len(L.labels)


def test_abelian_valid():
    for n in range(1, 5):
        assert abelian(n).is_abelian()


def test_sl2_table(sl2):
    assert sl2.bracket(sl2.element("e"), sl2.element("f")) == sl2.element("h")
    assert sl2.bracket(sl2.element("h"), sl2.element("e")) == tuple(2 * c for c in sl2.element("e"))
    assert sl2.bracket(sl2.element("h"), sl2.element("f")) == tuple(-2 * c for c in sl2.element("f"))


def test_heisenberg_bracket_and_ad(heis):
    x, y, z = (heis.element(l) for l in "xyz")
    assert heis.bracket(tuple(a + b for a, b in zip(x, y)), y) == z
    adx = heis.ad(x)
    assert adx(y) == z and not any(adx(x)) and not any(adx(z))


def test_antisymmetry_violation_reported():
    space = SpaceDesc("L", ("e1", "e2"))
    z = (Fraction(0), Fraction(0))
    table = [[z, (Fraction(1), Fraction(0))], [z, z]]
    with pytest.raises(LieValidationError) as err:
        validate_lie(space, table)
    assert err.value.kind == "antisymmetry" and err.value.indices == (1, 2)


def test_jacobi_violation_reported():
    # [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e1 breaks Jacobi
    with pytest.raises(LieValidationError) as err:
        from_brackets("bad", ["e1", "e2", "e3"], {(0, 1): (0, 0, 1), (1, 2): (1, 0, 0), (0, 2): (-1, 0, 0)})
    assert err.value.kind == "jacobi"


@pytest.mark.parametrize("seed", range(20))
def test_perturbation_rejected(seed, sl2):
    rng = random.Random(seed)
    i, j = rng.sample(range(3), 2)
    k = rng.randrange(3)
    table = [list(map(list, row)) for row in sl2.table]
    table[i][j][k] += Fraction(rng.choice([1, -1, 2]))
    with pytest.raises(LieValidationError):
        validate_lie(sl2.space, [[tuple(v) for v in row] for row in table])


@given(st.integers(0, 2 ** 31), st.sampled_from(["sl2", "heisenberg_3", "solvable_2"]))
@settings(max_examples=40, deadline=None)
def test_ad_is_derivation_and_homomorphism(seed, name):
    L = load_lie(name)
    rng = random.Random(seed)
    y, a, b = (random_vector(rng, L.dim) for _ in range(3))
    ad = L.ad(y)
    lhs = ad(L.bracket(a, b))
    rhs = tuple(p + q for p, q in zip(L.bracket(ad(a), b), L.bracket(a, ad(b))))
    assert lhs == rhs
    assert not any(L.bracket(a, a))
    comm = L.ad(a).compose(L.ad(b)) - L.ad(b).compose(L.ad(a))
    assert comm.matrix == L.ad(L.bracket(a, b)).matrix


def test_nilpotency_bounds(sl2, heis, solv):
    assert nilpotency_bound(abelian(2)) == 1
    assert nilpotency_bound(heis) == 2
    assert nilpotency_bound(sl2) is None
    assert nilpotency_bound(solv) is None


def test_json_round_trip(tmp_path, sl2):
    p = tmp_path / "sl2.json"
    p.write_text(json.dumps(lie_to_json(sl2)))
    assert load_lie(p) == sl2
    assert lie_from_json(json.loads(p.read_text())) == sl2


def test_missing_fixture():
    with pytest.raises(FileNotFoundError):
        load_lie("no_such_algebra")
