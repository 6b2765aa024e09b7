import random

import pytest
from hypothesis import given, settings, strategies as st

from liewreath.action import (
    ActionDefect,
    embed_j,
    load_action,
    make_action,
    pointwise_bracket,
    prolong,
)
from liewreath.lie import abelian, load_lie
from liewreath.polyjet import Jet, curry
from liewreath.sampling import random_poly_jet
from liewreath.spaces import SpaceDesc, product_space
from liewreath.vectorfield import bracket_S, bracket_pointwise_S, derive, embed_x

X1 = SpaceDesc("X", ("x",))
Y1 = SpaceDesc("Y", ("y",))
Y2 = SpaceDesc.standard("Y", 2, "y")
F1 = SpaceDesc("F", ("f",))


def line_field(e, c=1):
    return Jet.from_terms(X1, X1, 4, [((e,), 0, c)], polynomial=True)


@pytest.fixture(scope="module")
def projective():
    return load_action("sl2_projective_action")


def test_zero_images_valid(sl2):
    make_action(sl2, X1, [Jet.zero(X1, X1, 3)] * 3)


def test_single_generator_valid():
    make_action(abelian(1), X1, [line_field(1)])


def test_projective_fixture(projective, sl2):
    assert projective.algebra == sl2 and projective.polynomial


def test_defect_reported(sl2):
    with pytest.raises(ActionDefect) as err:
        make_action(sl2, X1, [line_field(1, 2), line_field(2, 1), line_field(0, 1)])
    # with D_e = +x² the (h, e) relation still holds; (e, f) fails in degree 1
    assert err.value.pair == (1, 2) and err.value.degree == 1


def test_pointwise_examples(heis):
    x, y, z = (heis.element(l) for l in "xyz")
    f = Jet.constant(Y1, heis.space, x, 2)
    g = Jet.from_terms(Y1, heis.space, 2, {(1,): y}, polynomial=True)
    assert pointwise_bracket(f, g, heis).components[1].coeffs == {(1,): z}
    assert pointwise_bracket(f, f, heis).is_zero()
    A = abelian(2)
    rng = random.Random(0)
    a, b = (random_poly_jet(rng, Y2, A.space, 3) for _ in range(2))
    assert pointwise_bracket(a, b, A).is_zero()


@given(st.integers(0, 2 ** 31), st.sampled_from(["sl2", "heisenberg_3", "solvable_2"]))
@settings(max_examples=30, deadline=None)
def test_pointwise_jacobi(seed, name):
    A = load_lie(name)
    rng = random.Random(seed)
    f, g, h = (random_poly_jet(rng, Y2, A.space, 3, density=0.4) for _ in range(3))
    pb = lambda a, b: pointwise_bracket(a, b, A)
    assert pb(f, pb(g, h)).agrees_with(pb(pb(f, g), h) - pb(pb(f, h), g))


def test_prolong_examples():
    A = abelian(1)
    D = make_action(A, X1, [line_field(1)])
    Z = product_space(X1, Y1)
    a = Jet.from_terms(Y1, A.space, 2, [((1,), 0, 1)], polynomial=True)
    res = prolong(D, a, Z)
    assert {(m, k): c for _, m, k, c in res.terms()} == {((1, 1), 0): 1}
    assert prolong(D, Jet.zero(Y1, A.space, 2), Z).is_zero()


def test_prolong_constant_is_image(projective, sl2):
    Z = product_space(X1, Y1)
    for lab, img in zip(sl2.labels, projective.images):
        const = Jet.constant(Y1, sl2.space, sl2.element(lab), 0)
        assert prolong(projective, const, Z).agrees_with(embed_x(img, Z))


@given(st.integers(0, 2 ** 31))
@settings(max_examples=30, deadline=None)
def test_prolong_is_homomorphism(seed):
    D = load_action("sl2_projective_action")
    A = D.algebra
    rng = random.Random(seed)
    a, b = (random_poly_jet(rng, Y2, A.space, 2) for _ in range(2))
    Z = product_space(X1, Y2)
    lhs = prolong(D, pointwise_bracket(a, b, A), Z)
    rhs = bracket_S(prolong(D, a, Z), prolong(D, b, Z))
    assert lhs.agrees_with(rhs)


@pytest.mark.parametrize("seed", range(10))
def test_action_on_functions(seed, projective, sl2):
    rng = random.Random(seed)
    f = random_poly_jet(rng, X1, F1, 4)
    for i in range(3):
        for j in range(3):
            Di, Dj = projective.images[i], projective.images[j]
            lhs = derive(projective.image(sl2.table[i][j]), f)
            rhs = derive(Di, derive(Dj, f)) - derive(Dj, derive(Di, f))
            assert lhs.agrees_with(rhs)


@pytest.mark.parametrize("seed", range(30))
def test_embedding_j_is_lie_homomorphism(seed):
    rng = random.Random(seed)
    X = SpaceDesc.standard("X", 2, "x")
    Z = product_space(X, Y1)
    f = curry(random_poly_jet(rng, Z, X, 3, density=0.3))
    g = curry(random_poly_jet(rng, Z, X, 3, density=0.3))
    lhs = embed_j(bracket_pointwise_S(f, g), Z)
    rhs = bracket_S(embed_j(f, Z), embed_j(g, Z))
    assert lhs.agrees_with(rhs)


def test_embedding_j_trivial():
    X = SpaceDesc.standard("X", 2, "x")
    Z = product_space(X, Y1)
    rng = random.Random(2)
    xi = random_poly_jet(rng, X, X, 3)
    const = curry(_x_valued(xi, Z))
    assert embed_j(const, Z).agrees_with(embed_x(xi, Z))
    assert embed_j(curry(Jet.zero(Z, X, 2)), Z).is_zero()


def _x_valued(xi, Z):
    terms = [(m + (0,) * (Z.dim - len(m)), k, c) for _, m, k, c in xi.terms()]
    return Jet.from_terms(Z, xi.target, xi.order, terms, polynomial=True)
