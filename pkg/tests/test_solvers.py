import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from orbitrel.errors import EmptyInput
from orbitrel.series import MultiPoly
from orbitrel.solvers import (SolutionFamily, dominance_certificates, dominant_monomials,
                              integer_kernel, integer_solve, is_saturated, linear_solve,
                              mann_family_valid, mann_solve, row_hnf, saturate)
from orbitrel.valued_field import FieldSpec

LT = FieldSpec.laurent(20)


def random_poly(rng, n):
    T = LT.uniformizer()
    terms = {}
    for _ in range(rng.randint(1, 8)):
        I = tuple(rng.randint(0, 4) for _ in range(n))
        terms[I] = T ** rng.randint(0, 10) * rng.choice([1, -1, 3])
    return MultiPoly(LT, n, terms)


def grid_oracle(G, W=20):
    pts = [(I, c.val) for I, c in G.terms.items()]
    found = set()
    for w in product(range(W + 1), repeat=G.nvars):
        vals = [v + sum(i * x for i, x in zip(I, w)) for I, v in pts]
        m = min(vals)
        found.update(I for (I, _), val in zip(pts, vals) if val == m)
    return found


def test_dominant_monomials_example():
    T = LT.uniformizer()
    # x1 - T x2^2 + T^5 x1 x2: the mixed term never attains the minimum
    G = MultiPoly(LT, 2, {(1, 0): 1, (0, 2): -T, (1, 1): T ** 5})
    assert dominant_monomials(G) == {(1, 0), (0, 2)}
    certs = dominance_certificates(G)
    for I, cert in certs.items():
        vals = {J: c.val + sum(a * b for a, b in zip(J, cert.weight)) for J, c in G.terms.items()}
        assert vals[I] == min(vals.values())
    with pytest.raises(EmptyInput):
        dominant_monomials(MultiPoly(LT, 2, {}))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_dominant_monomials_match_the_weight_grid(seed):
    rng = random.Random(seed)
    G = random_poly(rng, rng.randint(1, 3))
    certs = dominance_certificates(G)
    F = set(certs)
    # a small grid can miss exponents that only win at large weights
    assert grid_oracle(G) <= F
    W = max([20] + [x for c in certs.values() for x in c.weight])
    assert F == grid_oracle(G, W)


def test_dominant_monomial_outside_the_small_grid():
    T = LT.uniformizer()
    vals = {(0, 2): 6, (0, 3): 8, (1, 3): 10, (3, 1): 10, (1, 4): 7, (4, 1): 4, (4, 2): 1}
    G = MultiPoly(LT, 2, {I: T ** v for I, v in vals.items()})
    # (3, 1) is the unique minimum only at weights such as (7, 26)
    assert (3, 1) not in grid_oracle(G)
    assert (3, 1) in dominant_monomials(G)
    w = dominance_certificates(G)[(3, 1)].weight
    tot = {I: v + I[0] * w[0] + I[1] * w[1] for I, v in vals.items()}
    assert [I for I in tot if tot[I] == min(tot.values())] == [(3, 1)]


def test_integer_linear_algebra():
    A = [[2, 4, 6]]
    K = integer_kernel(A, 3)
    assert len(K) == 2
    assert all(sum(a * k for a, k in zip(A[0], v)) == 0 for v in K)
    assert integer_solve(A, [3], 3) is None
    t = integer_solve(A, [8], 3)
    assert sum(a * x for a, x in zip(A[0], t)) == 8
    assert row_hnf([[2, 4], [1, 3]]) == [[1, 1], [0, 2]]
    assert not is_saturated([[2, 4]], 2)
    assert is_saturated([[1, 2]], 2)


def test_saturate_keeps_the_integer_points():
    fam = SolutionFamily.make(2, lattice=([[2, 4]], [6]))
    (sat,) = saturate(fam)
    assert is_saturated(list(sat.lattice[0]), 2)
    assert set(sat.points_in_box(10)) == set(fam.points_in_box(10))


def test_linear_solve():
    fam, w = linear_solve([1, -2], 2, box=10)
    assert w == (2, 0)
    assert set(fam.points_in_box(6)) == {(2, 0), (4, 1), (6, 2)}
    assert linear_solve([2, 4], 3) is None
    fam, w = linear_solve([0, 0], 0)
    assert fam.points_in_box(1) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_family_membership_and_json():
    fam = SolutionFamily.make(3, fixed={0: 2}, offsets=[(2, 1, 3)], lower=[0, 1, 0])
    assert (2, 1, 4) in fam
    assert (2, 0, 3) not in fam
    assert SolutionFamily.from_json(fam.to_json()) == fam
    assert fam.to_json()["fixed"] == [{"var": "1", "value": "2"}]


def test_mann_examples():
    (fam,) = mann_solve([1, -1], 2, 4)
    assert fam.is_point and fam.fixed == ((0, 3), (1, 2))
    (fam,) = mann_solve([1, -1], 3, 0)
    assert fam.offsets == ((1, 0, 0),)
    assert mann_solve([1, 1], 2, 0) == []
    # every family must satisfy the equation identically in its free roots
    fams = mann_solve([1, 1, -2], 2, 0)
    for f in fams:
        assert mann_family_valid([1, 1, -2], 2, 0, f)
    with pytest.raises(ValueError):
        mann_solve([1, 0], 2, 1)


def brute_mann(coeffs, base, rhs, B):
    return {t for t in product(range(B + 1), repeat=len(coeffs))
            if sum(c * base ** e for c, e in zip(coeffs, t)) == rhs}


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_mann_matches_brute_force(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    coeffs = [rng.choice([c for c in range(-20, 21) if c]) for _ in range(n)]
    base = rng.choice([2, 3, 5])
    rhs = rng.choice([0, rng.randint(-400, 400)])
    fams = mann_solve(coeffs, base, rhs)
    union = set()
    for f in fams:
        assert mann_family_valid(coeffs, base, rhs, f)
        union.update(f.points_in_box(10))
    assert union == brute_mann(coeffs, base, rhs, 10)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_family_json_roundtrip(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    fixed = {i: rng.randint(0, 5) for i in range(n) if rng.random() < 0.3}
    rows = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(rng.randint(0, 2))]
    lat = (rows, [rng.randint(-4, 4) for _ in rows]) if rows else None
    fam = SolutionFamily.make(n, fixed=fixed, lattice=lat, lower=[rng.randint(0, 2) for _ in range(n)])
    if fam is None:
        return
    assert SolutionFamily.from_json(fam.to_json()) == fam
