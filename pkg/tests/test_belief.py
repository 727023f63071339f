import numpy as np
import pytest
from hypothesis import given, settings

from bernoulli_drd import belief as bl
from bernoulli_drd import oracle
from bernoulli_drd.model import validate_instance

from conftest import instance_and_observation, obs_vector


def test_init_belief(pair_instance):
    s = bl.init_belief(pair_instance)
    r = s.region(0)
    assert (r.free_product, r.killed, r.likelihood_sq, r.num_unobserved) == (0.25, False, 1.0, 2)
    assert bl.init_belief(validate_instance(1, [0.9], [[0]])).region(0).free_product == 0.9
    three = validate_instance(3, [0.5] * 3, [[0], [1], [2]])
    assert len(bl.init_belief(three).free_product) == 3


def test_observe_pass(pair_instance):
    s = bl.observe(bl.init_belief(pair_instance), 0, 1)
    r = s.region(0)
    assert (r.free_product, r.killed, r.likelihood_sq) == (0.5, False, 0.25)


def test_observe_fail(pair_instance):
    s = bl.observe(bl.init_belief(pair_instance), 0, 0)
    assert s.region(0).killed
    assert s.region(0).likelihood_sq == 0.25


def test_observe_twice_rejected(pair_instance):
    s = bl.observe(bl.init_belief(pair_instance), 0, 1)
    with pytest.raises(bl.AlreadyObserved):
        s.observe(0, 1)


def test_observe_leaves_other_regions_untouched():
    inst = validate_instance(3, [0.5, 0.6, 0.7], [[0, 1], [2]])
    s = bl.observe(bl.init_belief(inst), 0, 0)
    assert s.region(1) == bl.init_belief(inst).region(1)
    assert s.active_tally.tolist() == [0, 0, 1]


@pytest.mark.parametrize("obs, valid, invalid, post", [
    ({}, 0.25, 0.75, 0.25),
    ({0: 1}, 0.25, 0.25, 0.5),
    ({0: 0}, 0.0, 0.5, 0.0),
    ({0: 1, 1: 1}, 0.25, 0.0, 1.0),
    ({1: 0}, 0.0, 0.5, 0.0),
])
def test_masses_and_posterior(pair_instance, obs, valid, invalid, post):
    s = bl.belief_from_outcomes(pair_instance, obs)
    assert bl.region_validity_mass(s, 0) == pytest.approx(valid, abs=1e-15)
    assert bl.region_invalidity_mass(s, 0) == pytest.approx(invalid, abs=1e-15)
    assert bl.region_posterior(s, 0) == post


def test_posterior_exact_one_only_when_validated(pair_instance):
    s = bl.belief_from_outcomes(pair_instance, {0: 1, 1: 1})
    assert s.validated().tolist() == [0]
    assert s.posteriors().tolist() == [1.0]


def test_belief_from_vector_matches_pairs(pair_instance):
    a = bl.belief_from_outcomes(pair_instance, np.array([1, -1]))
    b = bl.belief_from_outcomes(pair_instance, [(0, 1)])
    assert a.region(0) == b.region(0)


def test_copy_is_independent(pair_instance):
    s = bl.init_belief(pair_instance)
    c = s.copy()
    c.observe(0, 0)
    assert not s.killed[0] and c.killed[0]


@settings(max_examples=200, deadline=None)
@given(instance_and_observation())
def test_masses_match_enumeration(case):
    inst, pairs = case
    s = bl.belief_from_outcomes(inst, pairs)
    x = obs_vector(inst, pairs)
    for r in range(inst.num_regions):
        v, iv = oracle.enum_region_masses(inst, r, x)
        assert bl.region_validity_mass(s, r) == pytest.approx(v, abs=1e-9)
        assert bl.region_invalidity_mass(s, r) == pytest.approx(iv, abs=1e-9)
        assert bl.region_posterior(s, r) == pytest.approx(
            oracle.enum_region_posterior(inst, r, x), abs=1e-9)
        lik = float(s.likelihood[r])
        assert v + iv == pytest.approx(lik, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(instance_and_observation())
def test_incremental_equals_batch(case):
    inst, pairs = case
    s = bl.belief_from_outcomes(inst, pairs)
    fresh = s.copy()
    for r in range(inst.num_regions):
        fresh.refresh_region(r)
    assert np.allclose(s.free_product, fresh.free_product, rtol=0, atol=1e-9)
    assert np.allclose(s.likelihood_sq, fresh.likelihood_sq, rtol=0, atol=1e-9)
    assert np.array_equal(s.killed, fresh.killed)
    assert np.array_equal(s.num_unobserved, fresh.num_unobserved)
    live = ~s.killed
    expected = np.zeros(inst.num_tests, dtype=int)
    for r in np.flatnonzero(live):
        expected[inst.regions[r]] += 1
    assert np.array_equal(s.active_tally, expected)


def test_drift_refresh_on_long_sequences():
    # one region over 200 tests exercises several periodic refreshes
    rng = np.random.default_rng(0)
    theta = rng.uniform(0.9, 0.999, 200)
    inst = validate_instance(200, theta, [list(range(200))])
    s = bl.init_belief(inst)
    for t in range(150):
        s.observe(t, 1)
    assert s.free_product[0] == pytest.approx(np.prod(theta[150:]), rel=1e-12)
    assert s.likelihood_sq[0] == pytest.approx(np.prod(theta[:150]) ** 2, rel=1e-12)
