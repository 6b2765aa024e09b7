import random
from fractions import Fraction
from math import factorial

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from liewreath.extension import (
    EXTENSION_FIXTURES,
    ExtensionError,
    NotNilpotentError,
    extension_from_json,
    extension_to_json,
    h_closed_form_nilpotent,
    h_series,
    h_series_C,
    kk_embed,
    load_extension,
    make_extension,
    proof_identities,
    verify_embedding,
)
from liewreath.fundamental import t_coefficients
from liewreath.polyjet import eval_jet
from liewreath.sampling import random_vector


@pytest.fixture(scope="module")
def solv_ext():
    return load_extension("solvable_2_extension")


@pytest.fixture(scope="module")
def heis_ext():
    return load_extension("heisenberg_center_extension")


def test_fixtures_load():
    for name in EXTENSION_FIXTURES:
        ext = load_extension(name)
        assert ext.A.dim == ext.C.dim - ext.B.dim


def test_not_a_section(solv):
    with pytest.raises(ExtensionError) as err:
        make_extension(solv, "abelian_1", [[1, 0]], [[0, 1]], [[2], [0]])
    assert err.value.kind == "not-a-section"


def test_kernel_mismatch(solv):
    with pytest.raises(ExtensionError) as err:
        make_extension(solv, "abelian_1", [[1, 0]], [[1, 1]], [[1], [0]])
    assert err.value.kind == "kernel-mismatch"


def test_not_a_homomorphism(solv):
    # projecting onto e2 does not respect [e1,e2] = e2
    with pytest.raises(ExtensionError) as err:
        make_extension(solv, "abelian_1", [[0, 1]], [[1, 0]], [[0], [1]])
    assert err.value.kind == "not-a-homomorphism"


def test_projection_off_the_center_rejected(heis):
    # (x, y, z) -> (y, z) kills x, but span{x} is not an ideal and p is not a homomorphism
    with pytest.raises(ExtensionError) as err:
        make_extension(heis, "abelian_2", [[0, 1, 0], [0, 0, 1]], [[1, 0, 0]], [[0, 0], [1, 0], [0, 1]])
    assert err.value.kind == "not-a-homomorphism"
    assert err.value.witness == (0, 1)


def test_json_round_trip(solv_ext):
    again = extension_from_json(extension_to_json(solv_ext))
    assert again.C == solv_ext.C and again.s.matrix == solv_ext.s.matrix


def test_malformed_json():
    with pytest.raises(ValueError):
        extension_from_json({"C": "solvable_2"})


def test_h_series_solvable(solv_ext):
    h = h_series(solv_ext, "e2", 8)
    for m in range(9):
        assert h.components[m].coeffs == {(m,): (Fraction(1, factorial(m)),)}
    assert h_series(solv_ext, "e1", 8).is_zero()


def test_h_on_ideal_degree_zero():
    for name in EXTENSION_FIXTURES:
        ext = load_extension(name)
        for a in ext.ideal_basis:
            h0 = h_series_C(ext, a, 0).components[0].coeffs
            assert h0 == {(0,) * ext.B.dim: a}


def test_kk_embed_examples(solv_ext):
    u = kk_embed(solv_ext, "e1", 8)
    assert u.f.is_zero() and u.b == (1,)
    u = kk_embed(solv_ext, "e2", 8)
    assert u.b == (0,) and u.f.components[3].coeffs == {(3,): (Fraction(1, 6),)}
    z = kk_embed(solv_ext, (0, 0), 8)
    assert z.f.is_zero() and z.b == (0,)


def test_two_sections_differ_and_pass():
    a, b = load_extension("solvable_2_extension"), load_extension("solvable_2_extension_alt")
    assert h_series(a, "e1", 6) != h_series(b, "e1", 6)
    assert verify_embedding(a, 8)["ok"] and verify_embedding(b, 8)["ok"]


@pytest.mark.parametrize("name", EXTENSION_FIXTURES)
def test_verify_embedding(name):
    rep = verify_embedding(load_extension(name), 8)
    assert rep["ok"] and rep["injective"]
    assert all(c["compared_up_to"] == 7 for c in rep["homomorphism"])


@given(st.integers(0, 2 ** 31), st.sampled_from(EXTENSION_FIXTURES))
@settings(max_examples=20, deadline=None)
def test_h_values_lie_in_ideal(seed, name):
    ext = load_extension(name)
    c = random_vector(random.Random(seed), ext.C.dim)
    hc = h_series_C(ext, c, 8)
    for comp in hc.components:
        for v in comp.coeffs.values():
            assert not any(ext.p(v))


@given(st.integers(0, 2 ** 31), st.sampled_from(EXTENSION_FIXTURES))
@settings(max_examples=15, deadline=None)
def test_linearity(seed, name):
    ext = load_extension(name)
    rng = random.Random(seed)
    c1, c2 = random_vector(rng, ext.C.dim), random_vector(rng, ext.C.dim)
    lam = random_vector(rng, 1)[0]
    combo = tuple(lam * x + y for x, y in zip(c1, c2))
    assert h_series(ext, combo, 6) == h_series(ext, c1, 6).scale(lam) + h_series(ext, c2, 6)


def test_direct_product_splits():
    ext = load_extension("direct_product_extension")
    for a in ext.ideal_basis:
        h = h_series(ext, a, 6)
        assert h.components[0].coeffs == {(0, 0): ext.to_ideal(a)} and h.is_zero() is False
        assert all(comp.is_zero() for comp in h.components[1:])
    for lab in ("u", "v"):
        assert h_series(ext, lab, 6).is_zero()


def test_closed_form_matches(heis_ext):
    for c in [*heis_ext.C.labels, (1, -2, Fraction(1, 3))]:
        assert h_closed_form_nilpotent(heis_ext, c, 8).agrees_with(h_series(heis_ext, c, 8))


def test_closed_form_rejects_non_nilpotent(solv_ext):
    with pytest.raises(NotNilpotentError):
        h_closed_form_nilpotent(solv_ext, "e1")


def test_closed_form_abelian_ideal():
    ext = make_extension("abelian_2", "abelian_1", [[1, 0]], [[0, 1]], [[1], [0]])
    h = h_closed_form_nilpotent(ext, (0, 1), 4)
    assert h.components[0].coeffs == {(0,): (1,)} and all(c.is_zero() for c in h.components[1:])


def _sym(q):
    return sympy.Rational(q.numerator, q.denominator)


@pytest.mark.parametrize("seed", range(5))
def test_closed_form_pointwise_matrices(seed, heis_ext):
    # evaluate the operator formula with concrete matrices at a point y
    ext = heis_ext
    rng = random.Random(seed)
    y = random_vector(rng, ext.B.dim)
    c = random_vector(rng, ext.C.dim)
    R = sympy.Matrix(ext.C.ad(ext.s(y)).matrix).applyfunc(_sym)
    e = sympy.Matrix(ext.e.matrix).applyfunc(_sym)
    n = ext.C.dim
    K = n + 1
    Ad = sum((R ** k / factorial(k) for k in range(K)), sympy.zeros(n))
    Q = sum((R ** k / factorial(k + 1) for k in range(K)), sympy.zeros(n))
    tt = t_coefficients(K)
    G = sum((_sym(tt[k]) * R ** k for k in range(K)), sympy.zeros(n))
    val = (Ad - Q * e * G) * sympy.Matrix([_sym(x) for x in c])
    h = h_series(ext, c, 8)
    expect = ext.to_ideal(tuple(Fraction(str(v)) for v in val))
    assert eval_jet(h, y, 8) == expect


@pytest.mark.parametrize("name", EXTENSION_FIXTURES)
def test_proof_identities(name):
    cells = proof_identities(load_extension(name), 6)
    assert {c["identity"] for c in cells} == {"u-bracket", "star-u", "star-v"}
    assert all(c["ok"] for c in cells)
