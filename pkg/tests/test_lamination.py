from __future__ import annotations

import collections
import itertools

import pytest
from hypothesis import given, strategies as st

from lattes_da.lamination import (
    H_SYSTEM,
    SHIFT_SYSTEM,
    TRIVIAL_SYSTEM,
    CantorSystem,
    CylinderAddress,
    InsufficientDepth,
    Rule,
    SymbolicPoint,
    de_bruijn,
    de_bruijn_point,
    dense_leaf_search,
    depth_seeds,
    h_apply,
    h_injectivity_check,
    h_inverse_apply,
    h_order_check,
    h_orbit_certificate,
    indecomposability_verdict,
    itinerary,
    leading_twos_profile,
    orbit_point,
    shift_apply,
    two_sided_visits,
    visits_csv,
)

import oracles

words02 = st.lists(st.sampled_from([0, 2]), min_size=0, max_size=12).map(tuple)
cycles02 = st.lists(st.sampled_from([0, 2]), min_size=1, max_size=4).map(tuple)
points02 = st.builds(SymbolicPoint, words02, cycles02)


def addr(text):
    return CylinderAddress(tuple(int(c) for c in text))


def test_h_rules():
    assert h_apply(addr("0000")) == addr("000")
    assert h_apply(addr("0220")) == addr("2020")
    assert h_apply(addr("20")) == addr("220")
    with pytest.raises(InsufficientDepth):
        h_apply(addr("0"))
    with pytest.raises(InsufficientDepth):
        h_apply(addr(""))
    with pytest.raises(ValueError):
        CylinderAddress((0, 1))


def test_zero_word_shrinks_to_fixed_point():
    a = addr("0" * 6)
    for n in range(5, 0, -1):
        a = h_apply(a)
        assert a == addr("0" * n)
    assert orbit_point(H_SYSTEM, SymbolicPoint((), (0,)), 7).take(10) == (0,) * 10


@given(points02)
def test_h_matches_affine_model(p):
    assert orbit_point(H_SYSTEM, p, 1).value() == oracles.h_real(p.value())


@given(points02, st.integers(1, 30))
def test_h_inverse(p, n):
    q = orbit_point(H_SYSTEM, orbit_point(H_SYSTEM, p, n), -n)
    assert q.value() == p.value()


def test_finite_inverse():
    for w in itertools.product((0, 2), repeat=5):
        a = CylinderAddress(w)
        assert h_inverse_apply(h_apply(a)) == a


@pytest.mark.parametrize("d", range(1, 9))
def test_h_injective(d):
    assert h_injectivity_check(d)


@pytest.mark.parametrize("d", range(1, 7))
def test_h_order_preserving(d):
    assert h_order_check(d)


def test_rule_tables_are_consistent():
    with pytest.raises(ValueError):
        CantorSystem("bad", (0, 1), (Rule((0,), ()), Rule((0, 1), ())))


def test_shift_apply():
    assert shift_apply((0, 1, 1, 0, 1)) == (1, 1, 0, 1)
    p = SymbolicPoint((), (0, 1))
    assert shift_apply(shift_apply(p)).take(6) == p.take(6)
    assert shift_apply(p).take(4) == (1, 0, 1, 0)
    with pytest.raises(ValueError):
        shift_apply(())


@pytest.mark.parametrize("k", range(1, 9))
def test_de_bruijn(k):
    w = de_bruijn(k)
    assert oracles.is_de_bruijn(w, k)
    v = dense_leaf_search(SHIFT_SYSTEM, k, 2**k, [de_bruijn_point(k)])
    assert v.found and len(v.visits) == 2**k


def test_shift_dense_leaf_depth6():
    v = dense_leaf_search(SHIFT_SYSTEM, 6, 2 * 2**6, [de_bruijn_point(6)])
    assert v.found
    assert str(v).startswith("dense_leaf_found")


def test_constant_word_is_not_dense():
    v = dense_leaf_search(SHIFT_SYSTEM, 1, 1000, [SymbolicPoint((), (0,))])
    assert not v.found
    assert set(v.visits) == {(0,)}


def test_horizon_precondition():
    with pytest.raises(ValueError):
        dense_leaf_search(SHIFT_SYSTEM, 6, 10, [de_bruijn_point(6)])


def test_h_depth2_has_a_dense_leaf():
    # at depth 2 a single orbit 00.. -> 02.. -> 20.. -> 22.. meets every cylinder
    v = dense_leaf_search(H_SYSTEM, 2, 10_000, depth_seeds(H_SYSTEM, 8))
    assert v.found
    assert set(v.visits) == {(0, 0), (0, 2), (2, 0), (2, 2)}


@pytest.mark.parametrize("k", range(3, 9))
def test_h_no_dense_leaf_at_depth_three_and_up(k):
    cert = h_orbit_certificate(k, horizon=200)
    assert cert.max_visited == 2 * k
    assert cert.no_dense_leaf
    assert not dense_leaf_search(H_SYSTEM, k, 10_000, depth_seeds(H_SYSTEM, 8)).found


def test_certificate_covers_every_orbit():
    # every point of a finite sample lies in the orbit class of some 02w seed
    k = 5
    cert = h_orbit_certificate(k, horizon=100)
    for w in itertools.product((0, 2), repeat=8):
        p = SymbolicPoint(w, (0,))
        assert len(two_sided_visits(H_SYSTEM, p, k, 100)) <= cert.max_visited


def test_leading_twos_grow():
    for seed in depth_seeds(H_SYSTEM, 8):
        prof = leading_twos_profile(seed, 2000)
        assert all(a <= b for a, b in zip(prof, prof[1:]))
        assert prof[-1] >= 2000 - 9


def test_leading_twos_incremental_matches_direct():
    seed = SymbolicPoint((0, 0, 2, 0, 2), (0, 2))
    prof = leading_twos_profile(seed, 30)
    for n, count in enumerate(prof):
        word = orbit_point(H_SYSTEM, seed, n).take(60)
        direct = len(list(itertools.takewhile(lambda s: s == 2, word)))
        assert count == direct


def test_itinerary_replays():
    it = itinerary(H_SYSTEM, SymbolicPoint((0, 0, 2), (0,)), 3, 25)
    assert it.validate()
    assert it.log[:4] == ((0, 0, 2), (0, 2, 0), (2, 0, 0), (2, 2, 0))
    forged = type(it)(it.system, it.base, it.depth, it.log[:-1] + ((0, 0, 0),))
    assert not forged.validate()


def test_verdicts():
    shift = indecomposability_verdict(SHIFT_SYSTEM, 6, 128)
    assert shift.indecomposable and str(shift).startswith("consistent_with_indecomposable(6)")
    h = indecomposability_verdict(H_SYSTEM, 6, 10_000)
    assert not h.indecomposable and h.exhaustive
    assert str(h) == "no_dense_leaf_detected(6) [exhaustive, horizon=10000]"
    triv = indecomposability_verdict(TRIVIAL_SYSTEM, 1, 10)
    assert str(triv) == "no_dense_leaf_detected(1) [exhaustive, horizon=10]"
    assert "one-symbol" in triv.search.reason


def test_visits_csv():
    v = dense_leaf_search(SHIFT_SYSTEM, 2, 4, [de_bruijn_point(2)])
    assert visits_csv(SHIFT_SYSTEM, 2, v.visits) == "cylinder,visits\n00,1\n01,1\n10,1\n11,1\n"


def _brute_two_sided(system, base, depth, steps):
    visits = itertools.chain(
        itinerary(system, base, depth, steps).log,
        (orbit_point(system, base, -n).take(depth) for n in range(1, steps + 1)),
    )
    return dict(collections.Counter(visits))


@given(points02, st.integers(1, 5), st.integers(0, 60))
def test_visit_shortcut_matches_brute_force(p, k, steps):
    assert dict(two_sided_visits(H_SYSTEM, p, k, steps)) == _brute_two_sided(H_SYSTEM, p, k, steps)
