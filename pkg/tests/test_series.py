import random

import pytest
from hypothesis import given, settings, strategies as st

from orbitrel.errors import ConstantTermNonzero, EmptyInput, OutsideConvergenceControl
from orbitrel.series import (MultiPoly, TruncatedSeries, compose, eval_poly, eval_series,
                             gauss_norm_valuation)
from orbitrel.valued_field import INF, FieldSpec, eq_to_precision, exactly_equal

LT = FieldSpec.laurent(30)
Q3 = FieldSpec.padic(3, 30)


def poly(field, terms, trunc=None):
    trunc = trunc if trunc is not None else max(terms)
    return TruncatedSeries.from_terms(field, terms, trunc, polynomial=True)


def test_geometric_series_times_one_minus_x():
    g = TruncatedSeries.from_terms(LT, {i: 1 for i in range(11)}, 10)
    prod = g * poly(LT, {0: 1, 1: -1})
    assert prod.trunc == 10
    assert exactly_equal(prod.coefficient(0), LT.one())
    assert all(prod.coefficient(i).is_zero for i in range(1, 11))


def test_polynomial_product_is_exact():
    a = poly(LT, {1: 1, 2: 1})
    b = poly(LT, {1: 1, 3: -1})
    c = a * b
    assert c.polynomial and c.degree() == 5
    assert [int(c.coefficient(i).to_rational()) for i in range(6)] == [0, 0, 1, 1, -1, -1]


def test_truncation_orders_track_the_leading_zeros():
    # (x^2 + O(x^6)) * (x + O(x^4)): the x^2 * O(x^4) error starts at x^6
    s = TruncatedSeries.from_terms(LT, {2: 1}, 5)
    t = TruncatedSeries.from_terms(LT, {1: 1}, 3)
    assert (s * t).trunc == 5


def test_compose_examples():
    x = TruncatedSeries.x(LT, 8)
    f = poly(LT, {1: 2, 2: 1})
    assert compose(f, x) == f
    ff = compose(f, f)
    # f(f(x)) = 2(2x+x^2) + (2x+x^2)^2 = 4x + 6x^2 + 4x^3 + x^4
    assert [int(ff.coefficient(i).to_rational()) for i in range(5)] == [0, 4, 6, 4, 1]
    with pytest.raises(ConstantTermNonzero):
        compose(f, poly(LT, {0: 1, 1: 1}))


def test_gauss_norm():
    T = LT.uniformizer()
    s = poly(LT, {1: T ** 2, 3: T})
    assert gauss_norm_valuation(s) == 1
    with pytest.raises(EmptyInput):
        gauss_norm_valuation(TruncatedSeries.from_terms(LT, {}, 4, polynomial=True))


def test_eval_series_domain():
    s = TruncatedSeries.from_terms(Q3, {1: 1, 2: 1}, 6)
    with pytest.raises(OutsideConvergenceControl):
        eval_series(s, Q3.one())
    y = eval_series(s, Q3(3))
    # tail error: the unknown coefficients start at x^7
    assert y.val == 1
    assert y.absprec <= 7
    assert eq_to_precision(y, Q3(12))


def test_multipoly_eval_and_substitute():
    x1, x2 = MultiPoly.variable(LT, 2, 0), MultiPoly.variable(LT, 2, 1)
    G = x1 * x2 - x2 ** 2 * 3 + 1
    T = LT.uniformizer()
    v = eval_poly(G, [T, T ** 2])
    assert exactly_equal(v, T ** 3 - T ** 4 * 3 + 1)
    H = G.substitute(0, T)
    assert H.nvars == 1
    assert exactly_equal(eval_poly(H, [T ** 2]), v)
    with pytest.raises(OutsideConvergenceControl):
        eval_poly(G, [LT.one(), T])


def test_json_roundtrips():
    T = LT.uniformizer()
    s = TruncatedSeries.from_terms(LT, {1: T, 4: T ** -1 + 2}, 9)
    assert TruncatedSeries.from_json(LT, s.to_json()) == s
    G = MultiPoly(LT, 2, {(1, 0): T, (0, 3): -1})
    assert MultiPoly.from_json(LT, G.to_json()) == G


def _series(rng, field, trunc, start=0, polynomial=False):
    u = field.uniformizer()
    terms = {i: u ** rng.randint(0, 3) * rng.choice([1, -1, 2, 5])
             for i in range(start, trunc + 1) if rng.random() < 0.6}
    return TruncatedSeries.from_terms(field, terms, trunc, polynomial=polynomial)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([LT, Q3]))
def test_compose_is_associative(seed, field):
    rng = random.Random(seed)
    f = _series(rng, field, 8, start=0)
    g = _series(rng, field, 8, start=1)
    h = _series(rng, field, 8, start=1)
    left = compose(compose(f, g), h)
    right = compose(f, compose(g, h))
    T = min(left.trunc, right.trunc)
    for i in range(T + 1):
        assert eq_to_precision(left.coefficient(i), right.coefficient(i))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([LT, Q3]))
def test_gauss_norm_is_multiplicative_on_polynomials(seed, field):
    rng = random.Random(seed)
    a = _series(rng, field, 5, polynomial=True)
    b = _series(rng, field, 5, polynomial=True)
    if a.degree() < 0 or b.degree() < 0:
        return
    assert gauss_norm_valuation(a * b) == gauss_norm_valuation(a) + gauss_norm_valuation(b)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_eval_commutes_with_compose(seed):
    rng = random.Random(seed)
    f = _series(rng, LT, 6, polynomial=True)
    g = _series(rng, LT, 6, start=1, polynomial=True)
    x = LT.uniformizer() ** rng.randint(1, 3)
    assert exactly_equal(eval_series(compose(f, g), x), eval_series(f, eval_series(g, x)))
