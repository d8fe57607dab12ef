import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from orbitrel.classifier import (BOX_VERIFIED, PROVED, REFUTED, ClassificationReport,
                                 DeformedTorusFamily, IterationalVariety, _Context,
                                 brute_force_oracle, classify, classify_ideal, necessity_pairs,
                                 pair_equation, verify_family)
from orbitrel.dynamics import orbit_values, validate
from orbitrel.series import MultiPoly, TruncatedSeries, eval_poly
from orbitrel.solvers import SolutionFamily
from orbitrel.valued_field import FieldSpec, decide_zero

from corpus import classifier_instance

LT = FieldSpec.laurent(20)
T = LT.uniformizer()


def poly(terms):
    return TruncatedSeries.from_terms(LT, terms, max(terms), polynomial=True)


def xs(n):
    return [MultiPoly.variable(LT, n, i) for i in range(n)]


def test_torus_example():
    # f = T x, a = T^2: f^t(a) = T^(t+2); x1 = x2^2 iff t1 = 2 t2 + 2
    sys = validate(poly({1: T}))
    x1, x2 = xs(2)
    rep = classify(sys, T ** 2, x1 - x2 ** 2, box=12)
    (fam,) = rep.families
    assert isinstance(fam, DeformedTorusFamily)
    assert fam.lattice_matrix == ((1, -2),) and fam.base_exponents == (2, 0)
    assert rep.verification[0].status == BOX_VERIFIED
    assert rep.points_in_box(12) == {(2 * s + 2, s) for s in range(6)}
    assert rep.residual_points == ()


def test_iterational_example():
    # f = T x^2: x2 = T x1^2 is the link x2 = f(x1)
    sys = validate(poly({2: T}))
    x1, x2 = xs(2)
    rep = classify(sys, T ** 2, x2 - x1 ** 2 * T, box=6)
    (fam,) = rep.families
    assert isinstance(fam, IterationalVariety)
    assert fam.links == ((1, 0, 1),) and fam.fixed == ()
    assert fam.equations() == ["x2 = f^1(x1)"]
    assert rep.verification[0].status == PROVED
    assert rep.points_in_box(6) == brute_force_oracle(sys, T ** 2, x2 - x1 ** 2 * T, 6)


def test_isolated_point_and_no_relations():
    sys = validate(poly({1: T, 2: 1}))
    a = T ** 2
    (x1,) = xs(1)
    target = orbit_values(sys, a, 3)[3]
    rep = classify(sys, a, x1 - target, box=8)
    # an isolated solution is reported as a residual point
    assert rep.families == () and rep.residual_points == ((3,),)
    rep = classify(sys, a, x1 + T ** 30, box=8)
    assert rep.families == () and rep.residual_points == ()


def test_pair_equations():
    sys = validate(poly({1: T ** 2}))
    eq = pair_equation(sys, 3, (1, 0), (0, 2), 0, 1)
    # 2 t1 + 3 = 1 + 2 (2 t2 + 3)
    assert eq.base is None
    assert eq.holds((4, 1)) and not eq.holds((1, 1))
    sq = validate(poly({2: T}))
    eq = pair_equation(sq, 2, (1, 0), (0, 1), 0, 0)
    assert eq.base == 2 and eq.holds((3, 3))


def test_verify_family():
    sys = validate(poly({2: T}))
    x1, x2 = xs(2)
    G = x2 - x1 ** 2 * T
    link = SolutionFamily.make(2, offsets=[(1, 0, 1)])
    wrong = SolutionFamily.make(2, offsets=[(1, 0, 2)])
    assert verify_family(sys, T ** 2, G, link, box=5) == PROVED
    assert verify_family(sys, T ** 2, G, wrong, box=5) == REFUTED
    torus = validate(poly({1: T}))
    lat = SolutionFamily.make(2, lattice=([[1, -2]], [2]))
    assert verify_family(torus, T ** 2, x1 - x2 ** 2, lat, box=8) == BOX_VERIFIED


def test_classify_ideal_intersects():
    sys = validate(poly({1: T}))
    x1, x2 = xs(2)
    G1 = x1 - x2 ** 2
    G2 = x1 - T ** 6
    rep = classify_ideal(sys, T ** 2, [G1, G2], box=10)
    assert rep.points_in_box(10) == {(4, 1)}


def test_report_json_roundtrip():
    sys = validate(poly({1: T}))
    x1, x2 = xs(2)
    rep = classify(sys, T ** 2, x1 - x2 ** 2, box=10)
    back = ClassificationReport.from_json(rep.to_json())
    assert back.to_json() == rep.to_json()


def test_input_checks():
    sys = validate(poly({1: T}))
    (x1,) = xs(1)
    with pytest.raises(ValueError):
        classify(sys, T ** 2, x1 * T ** -1)


def exact_zeros(sys, a, G, B):
    orb = orbit_values(sys, a, B)
    return {t for t in product(range(B + 1), repeat=G.nvars)
            if decide_zero(eval_poly(G, [orb[i] for i in t]))}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_zero_decision_matches_exact_evaluation(seed):
    sys, a, G = classifier_instance(random.Random(seed))
    B = 4 if G.nvars < 3 else 3
    assert brute_force_oracle(sys, a, G, B) == exact_zeros(sys, a, G, B)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_classify_matches_brute_force(seed):
    sys, a, G = classifier_instance(random.Random(seed))
    B = 6
    rep = classify(sys, a, G, box=B)
    assert rep.points_in_box(B) == brute_force_oracle(sys, a, G, B)
    for fam in rep.families:
        assert isinstance(fam, IterationalVariety if sys.M >= 2 else DeformedTorusFamily)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_zeros_satisfy_a_dominant_pair_equation(seed):
    sys, a, G = classifier_instance(random.Random(seed))
    ctx = _Context(sys, a, 5, 32)
    N = ctx.N
    for t in brute_force_oracle(sys, a, G, 5):
        if min(t) >= N and not G.is_zero():
            shifted = tuple(x - N for x in t)
            assert necessity_pairs(sys, ctx.a1, G, shifted), t
