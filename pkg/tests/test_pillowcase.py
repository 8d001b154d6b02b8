from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from lattes_da.lattice import A, IntMatrix2, NotHyperbolic, RationalTorusPoint
from lattes_da.pillowcase import (
    BRANCH_POINTS,
    UnsupportedDegree,
    canonical_numeric,
    critical_points_f,
    critical_values_f,
    fiber,
    forward_orbit,
    homology_hyperbolic,
    induced_apply,
    periodic_census,
    project,
    sphere_distance,
    sphere_fixed_count,
    sphere_fixed_points,
    sphere_preimages,
    verify_lattes,
)

import oracles

P = RationalTorusPoint.of


def pi(a, b):
    return project(P(a, b))


DET2 = [A, IntMatrix2(3, 1, 1, 1), IntMatrix2(1, 1, 1, -1), IntMatrix2(2, 2, 1, 0), IntMatrix2(5, 3, 1, 1)]
CENSUS_A = [5, 21, 95, 433, 1975, 9009, 41095, 187457]


def test_projection_and_fiber():
    assert pi("3/4", "1/4") == pi("1/4", "3/4")
    assert len(fiber(pi("1/4", 0))) == 2
    assert len(fiber(pi("1/2", 0))) == 1
    assert len(BRANCH_POINTS) == 4


finite = st.floats(-10, 10, allow_nan=False)


@given(arrays(float, (5, 2), elements=finite))
def test_canonical_numeric(x):
    c = canonical_numeric(x)
    assert np.all((c >= 0) & (c < 1))
    assert np.array_equal(canonical_numeric(c), c)
    assert np.allclose(sphere_distance(canonical_numeric(-x), c), 0.0, atol=1e-12)


def test_sphere_distance_quotient():
    assert sphere_distance(np.array([0.1, 0.2]), np.array([0.9, 0.8])) == pytest.approx(0.0)
    assert sphere_distance(np.array([0.0, 0.0]), np.array([0.5, 0.0])) == pytest.approx(0.5)


def test_critical_structure_matches_oracle():
    pts, vals = oracles.critical_structure(A.rows())
    assert {p.rep.coords for p in critical_points_f(A)} == pts
    assert {p.rep.coords for p in critical_values_f(A)} == vals
    assert critical_points_f(A) == {pi("1/4", 0), pi("1/4", "1/2")}
    assert critical_values_f(A) == {pi(0, "1/2"), pi("1/2", 0)}


def test_branch_points_are_fixed_or_mapped_to_fixed():
    assert induced_apply(A, pi(0, 0)) == pi(0, 0)
    assert induced_apply(A, pi("1/2", "1/2")) == pi("1/2", "1/2")
    assert induced_apply(A, pi("1/2", 0)) == pi(0, 0)
    assert induced_apply(A, pi(0, "1/2")) == pi("1/2", "1/2")


def test_full_fixed_point_set():
    # three fixed points come from M x = -x off the branch set
    expected = {pi(0, 0), pi("1/2", "1/2"), pi("1/8", "3/8"), pi("1/4", "3/4"), pi("3/8", "1/8")}
    assert sphere_fixed_points(A, 1) == expected
    assert sphere_fixed_points(A, 1) & BRANCH_POINTS == {pi(0, 0), pi("1/2", "1/2")}


def test_postcritical_orbits():
    o = forward_orbit(A, pi("1/4", 0))
    assert o.points == (pi("1/4", 0), pi(0, "1/2"), pi("1/2", "1/2"))
    assert o.cycle == (pi("1/2", "1/2"),)
    assert not o.periodic
    assert str(o) == "pi(1/4,0) -> pi(0,1/2) -> [pi(1/2,1/2)]"


def test_sphere_preimages_degree_two():
    assert sphere_preimages(A, pi(0, "1/2")) == {pi("1/4", 0)}
    assert len(sphere_preimages(A, pi("1/3", "1/5"))) == 2


@pytest.mark.parametrize("m", DET2)
def test_lemma_suite(m):
    rep = verify_lattes(m)
    assert rep.ram and rep.crit and rep.inv and rep.nonperiodic and rep.thurston
    assert rep.all_passed
    assert not rep.topological_polynomial
    assert len(rep.crit_f) == 2


def test_lemma_suite_rejects():
    with pytest.raises(NotHyperbolic):
        verify_lattes(IntMatrix2(2, 0, 0, 1))
    with pytest.raises(UnsupportedDegree):
        verify_lattes(IntMatrix2(2, 1, 1, 2))


def test_homology_hyperbolic_exact():
    assert homology_hyperbolic(A)
    assert not homology_hyperbolic(IntMatrix2(2, 0, 0, 1))
    assert not homology_hyperbolic(IntMatrix2(0, -1, 1, 0))
    assert not homology_hyperbolic(IntMatrix2(1, 1, -1, 0))
    # +-sqrt(2): both expanding but off the circle
    assert homology_hyperbolic(IntMatrix2(1, 1, 1, -1))


@pytest.mark.parametrize("m", DET2)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_census_matches_enumeration(m, n):
    assert sphere_fixed_count(m, n) == len(oracles.sphere_fixed(m.rows(), n))


def test_census_values():
    rows = periodic_census(A, 8)
    assert [r.sphere_count for r in rows] == CENSUS_A
    assert rows[0].det_minus == -2 and rows[0].det_plus == 8
    for r in rows:
        assert r.sphere_count == (abs(r.det_minus) + abs(r.det_plus)) // 2
        assert r.log_rate >= math.log(2)
