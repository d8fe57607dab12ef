import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from orbitrel.dynamics import (boettcher, compositions, functional_residual, iterate_series,
                               iterate_valuation, koenigs, koenigs_inverse, normalize_basepoint,
                               orbit, orbit_values, validate)
from orbitrel.errors import DomainViolation, NotAttracting, PrecisionExhausted, ZeroMap
from orbitrel.series import TruncatedSeries, compose
from orbitrel.valued_field import INF, FieldSpec, eq_to_precision, exactly_equal

from corpus import random_attracting, random_basepoint, random_field, random_superattracting

LT = FieldSpec.laurent(40)
Q5 = FieldSpec.padic(5, 120)


def poly(field, terms):
    return TruncatedSeries.from_terms(field, terms, max(terms), polynomial=True)


def test_validate():
    T = LT.uniformizer()
    sys = validate(poly(LT, {1: T, 2: 1}))
    assert (sys.M, sys.vlam) == (1, 1)
    sys = validate(poly(LT, {3: 1, 4: T}))
    assert (sys.M, sys.vlam) == (3, 0) and sys.superattracting
    with pytest.raises(NotAttracting):
        validate(poly(LT, {1: 1}))
    with pytest.raises(DomainViolation):
        validate(poly(LT, {0: T, 1: T}))
    with pytest.raises(DomainViolation):
        validate(poly(LT, {2: T ** -1}))
    with pytest.raises(ZeroMap):
        validate(TruncatedSeries.from_terms(LT, {}, 3, polynomial=True))


def test_iterate_valuation_closed_forms():
    T = LT.uniformizer()
    lin = validate(poly(LT, {1: T ** 2}))
    assert [iterate_valuation(lin, 3, t) for t in range(4)] == [3, 5, 7, 9]
    sq = validate(poly(LT, {2: T}))
    # M^t v(a) + (M^t - 1)/(M - 1) v(lam)
    assert [iterate_valuation(sq, 2, t) for t in range(4)] == [2, 5, 11, 23]
    with pytest.raises(DomainViolation):
        iterate_valuation(lin, 2, 1)


def test_orbit_matches_direct_evaluation():
    T = LT.uniformizer()
    sys = validate(poly(LT, {1: T, 2: 1}))
    pts = orbit(sys, T ** 2, 5)
    assert [p.valuation for p in pts] == [2, 3, 4, 5, 6, 7]
    assert exactly_equal(pts[1].value, T ** 3 + T ** 4)


def test_normalize_basepoint():
    T = LT.uniformizer()
    sys = validate(poly(LT, {1: T ** 3, 2: 1}))
    # v(a) = 1 <= 3; f(a) = T^4 + T^2 has v = 2, then v = 4 > 3
    N, b = normalize_basepoint(sys, T)
    assert N == 2 and b.val == 4
    with pytest.raises(DomainViolation):
        normalize_basepoint(sys, LT.zero())
    with pytest.raises(DomainViolation):
        normalize_basepoint(sys, LT.one())
    # a = -T^3 is sent straight to 0
    with pytest.raises(DomainViolation):
        normalize_basepoint(sys, -T ** 3)


def test_koenigs_second_coefficient():
    # h_2 = f_2 / (lam - lam^2)
    lam = Fraction(5)
    sys = validate(poly(Q5, {1: 5, 2: 1}))
    h = koenigs(sys, 6)
    assert h.coefficient(1) == Q5.one()
    assert eq_to_precision(h.coefficient(2), Q5.from_rational(1 / (lam - lam ** 2)))
    assert functional_residual(sys, h, 6).residual_valuation() is INF


def test_koenigs_of_a_linear_map_is_the_identity():
    T = LT.uniformizer()
    h = koenigs(validate(poly(LT, {1: T})), 10)
    assert exactly_equal(h.coefficient(1), LT.one())
    assert all(h.coefficient(i).is_zero for i in range(2, 11))


def test_koenigs_precision_guard():
    small = FieldSpec.padic(5, 20)
    f = TruncatedSeries.from_terms(small, {1: small.from_digits(1, [1, 2], prec=19), 2: 1}, 15)
    koenigs(validate(f), 11)
    # 12 * v(lam) + 8 reaches the cap
    with pytest.raises(PrecisionExhausted):
        koenigs(validate(f), 12)


def test_koenigs_inverse_roundtrip():
    T = LT.uniformizer()
    sys = validate(poly(LT, {1: T, 2: 1, 3: -2}))
    h = koenigs(sys, 12)
    g = koenigs_inverse(h, 12)
    hg = compose(h, g, trunc=12)
    assert eq_to_precision(hg.coefficient(1), LT.one())
    assert all(hg.coefficient(i).is_zero for i in range(2, 13))


def test_boettcher_examples():
    T = LT.uniformizer()
    mono = validate(poly(LT, {2: T}))
    h = boettcher(mono, 10)
    assert all(h.coefficient(i).is_zero for i in range(2, h.trunc + 1))
    sys = validate(poly(LT, {2: 1, 3: 1}))
    h = boettcher(sys, 10)
    assert exactly_equal(h.coefficient(2), LT.from_rational(Fraction(1, 2)))
    assert functional_residual(sys, h, 10).residual_valuation() is INF
    with pytest.raises(DomainViolation):
        boettcher(validate(poly(LT, {1: T})), 5)


def test_iterate_series_and_compositions():
    T = LT.uniformizer()
    f = poly(LT, {1: T, 2: 1})
    assert iterate_series(f, 2, 8) == compose(f, f, trunc=8)
    assert list(compositions(4, 2)) == [(1, 3), (2, 2), (3, 1)]
    assert sum(1 for _ in compositions(10, 4)) == 84


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_orbit_valuations_follow_the_closed_form(seed):
    rng = random.Random(seed)
    field = random_field(rng, cap=60)
    sys = validate(random_superattracting(rng, field, trunc=8) if rng.random() < 0.5
                   else random_attracting(rng, field, trunc=8))
    a = random_basepoint(rng, sys)
    vals = [x.val for x in orbit_values(sys, a, 4)]
    assert vals == [iterate_valuation(sys, a.val, t) for t in range(5)]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_conjugacies_solve_their_equations(seed):
    rng = random.Random(seed)
    field = random_field(rng, cap=120)
    if rng.random() < 0.5:
        sys = validate(random_attracting(rng, field, trunc=12))
        h = koenigs(sys, 12)
    else:
        sys = validate(random_superattracting(rng, field, trunc=12))
        h = boettcher(sys, 12)
    assert functional_residual(sys, h, h.trunc).residual_valuation() is INF
