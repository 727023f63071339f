import math

import numpy as np
import pytest
from hypothesis import given, settings

from bernoulli_drd import belief as bl
from bernoulli_drd import objective as obj
from bernoulli_drd import oracle
from bernoulli_drd.model import validate_instance

from conftest import instance_and_observation, obs_vector


def test_wec_initial(pair_instance):
    assert obj.wec_initial(pair_instance, 0) == 0.75
    assert obj.wec_initial(validate_instance(1, [0.9], [[0]]), 0) == pytest.approx(0.1)


@pytest.mark.parametrize("obs, pruned, fec", [
    ({}, 0.75, 0.0),
    ({0: 1}, 0.125, 5 / 6),
    ({0: 0}, 0.25, 2 / 3),
    ({0: 1, 1: 1}, 0.0, 1.0),
])
def test_pruned_weight_and_fec(pair_instance, obs, pruned, fec):
    s = bl.belief_from_outcomes(pair_instance, obs)
    assert obj.wec_pruned(s, 0) == pytest.approx(pruned, abs=1e-15)
    assert obj.f_ec(s, 0) == pytest.approx(fec, abs=1e-15)
    assert obj.wec_pruned(s, 0) == pytest.approx(oracle.naive_wec(pair_instance, 0, obs_vector(
        pair_instance, obs.items())), abs=1e-15)


def test_fec_exact_endpoints(pair_instance):
    assert obj.f_ec(bl.init_belief(pair_instance), 0) == 0.0
    assert obj.f_ec(bl.belief_from_outcomes(pair_instance, {0: 1, 1: 1}), 0) == 1.0


def test_fdrd_noisy_or():
    inst = validate_instance(2, [0.5, 0.5], [[0], [1]])
    assert obj.f_drd(bl.init_belief(inst)) == 0.0
    assert obj.f_drd(bl.belief_from_outcomes(inst, {0: 0})) == pytest.approx(0.5)
    assert obj.f_drd(bl.belief_from_outcomes(inst, {1: 1})) == 1.0


def test_fdrd_below_one_without_validated_region():
    inst = validate_instance(2, [0.5, 0.5], [[0], [1]])
    s = bl.belief_from_outcomes(inst, {0: 0, 1: 0})
    assert obj.f_drd(s) < 1.0


def test_naive_weight_with_self_edges_reconciles_uniform_formula():
    # without self-edges the uniform-weight shortcut misses P(not R)/|H|
    inst = validate_instance(3, [0.5] * 3, [[0, 1]])
    r = 0
    missing = (1 - inst.region_prior(r)) / 2 ** inst.num_tests
    assert oracle.naive_wec(inst, r) == pytest.approx(oracle.golovin_uniform_wec(inst, r)
                                                      + missing, rel=1e-12)


def test_single_region_gain():
    inst = validate_instance(1, [0.5], [[0]])
    s = bl.init_belief(inst)
    assert obj.marginal_gain(s, 0) == pytest.approx(0.375, abs=1e-15)
    # on the empty observation the unnormalized gain is E[delta f_drd] times the initial weights
    delta = oracle.enum_expected_delta(inst, s.outcomes, 0)
    assert obj.marginal_gain(s, 0) == pytest.approx(delta * obj.wec_initial(inst, 0), abs=1e-12)


def test_gain_of_test_in_no_region_is_zero():
    inst = validate_instance(2, [0.5, 0.5], [[0]])
    assert obj.marginal_gain(bl.init_belief(inst), 1) == 0.0


def test_gain_rejects_observed_test(pair_instance):
    s = bl.belief_from_outcomes(pair_instance, {0: 1})
    with pytest.raises(bl.AlreadyObserved):
        obj.marginal_gain(s, 0)
    with pytest.raises(bl.AlreadyObserved):
        obj.normalized_gains(s, [0])


def test_normalized_gains_empty_request(pair_instance):
    assert obj.normalized_gains(bl.init_belief(pair_instance), []).size == 0


@settings(max_examples=200, deadline=None)
@given(instance_and_observation())
def test_weights_and_objectives_match_enumeration(case):
    inst, pairs = case
    s = bl.belief_from_outcomes(inst, pairs)
    x = obs_vector(inst, pairs)
    for r in range(inst.num_regions):
        assert obj.wec_initial(inst, r) == pytest.approx(oracle.naive_wec(inst, r), abs=1e-9)
        assert obj.wec_pruned(s, r) == pytest.approx(oracle.naive_wec(inst, r, x), abs=1e-9)
        assert obj.f_ec(s, r) == pytest.approx(oracle.enum_f_ec(inst, r, x), abs=1e-9)
    value = obj.f_drd(s)
    assert 0.0 <= value <= 1.0
    assert value == pytest.approx(oracle.enum_f_drd(inst, x), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(instance_and_observation())
def test_gain_is_scaled_expected_objective_gain(case):
    # gain = E[delta f_drd] * prod(initial weights) / prod(squared likelihoods)
    inst, pairs = case
    s = bl.belief_from_outcomes(inst, pairs)
    x = obs_vector(inst, pairs)
    scale = np.prod(obj.wec_initial_all(inst)) / np.prod(s.likelihood_sq)
    for t in np.flatnonzero(x == -1):
        # compare on the f_drd scale: the enumerated delta is a difference of values near 1
        delta = oracle.enum_expected_delta(inst, x, t)
        assert obj.marginal_gain(s, t) / scale == pytest.approx(delta, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(instance_and_observation())
def test_vectorized_gains_match_single(case):
    inst, pairs = case
    s = bl.belief_from_outcomes(inst, pairs)
    free = np.flatnonzero(s.outcomes == -1)
    every = obj.normalized_gains(s)
    subset = obj.normalized_gains(s, free)
    for t, g in zip(free, subset):
        assert g == pytest.approx(every[t], abs=1e-12)
        assert g == pytest.approx(obj.normalized_gain(s, t), abs=1e-12)


def test_log_residual_consistent():
    inst = validate_instance(3, [0.3, 0.6, 0.8], [[0, 1], [1, 2]])
    s = bl.belief_from_outcomes(inst, {1: 1})
    assert math.exp(obj.log_residual(s)) == pytest.approx(1.0 - obj.f_drd(s), rel=1e-12)
