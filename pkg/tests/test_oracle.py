import math

import numpy as np
import pytest

from bernoulli_drd import oracle
from bernoulli_drd.model import validate_instance
from bernoulli_drd.policies import Policy


def test_enumeration_table():
    inst = validate_instance(3, [0.5, 0.5, 0.5], [[0]])
    table = oracle.enumerate_hypotheses(inst)
    assert len(table) == 8
    assert np.allclose(table.prob, 0.125)
    rng = np.random.default_rng(1)
    inst = validate_instance(6, rng.uniform(0.1, 0.9, 6), [[0, 2, 5], [1]])
    assert oracle.enumerate_hypotheses(inst).prob.sum() == pytest.approx(1.0, abs=1e-12)
    for r in range(2):
        assert oracle.enum_region_prior(inst, r) == pytest.approx(inst.region_prior(r), abs=1e-12)


def test_enumeration_cap():
    inst = validate_instance(21, [0.5] * 21, [[0]])
    with pytest.raises(oracle.TooManyTests):
        oracle.enumerate_hypotheses(inst)


def test_naive_wec_examples(pair_instance):
    assert oracle.naive_wec(pair_instance, 0) == pytest.approx(0.75, abs=1e-15)
    assert oracle.naive_wec(pair_instance, 0, [1, -1]) == pytest.approx(0.125, abs=1e-15)


def test_naive_wec_cap():
    inst = validate_instance(13, [0.5] * 13, [[0]])
    with pytest.raises(oracle.TooManyTests):
        oracle.naive_wec(inst, 0)


def test_optimal_cost_examples():
    assert oracle.optimal_policy_cost(validate_instance(1, [0.3], [[0]])) == 1.0
    two = validate_instance(2, [0.9, 0.5], [[0], [1]])
    assert oracle.optimal_policy_cost(two) == pytest.approx(1.1, abs=1e-12)
    fair = validate_instance(2, [0.5, 0.5], [[0], [1]])
    assert oracle.optimal_policy_cost(fair, mode="check_all") == 2.0


def test_optimal_cost_caps():
    with pytest.raises(oracle.TooLarge):
        oracle.optimal_policy_cost(validate_instance(11, [0.5] * 11, [[0]]))
    with pytest.raises(oracle.TooLarge):
        oracle.optimal_policy_cost(validate_instance(6, [0.5] * 6, [[i] for i in range(6)]))


def test_policy_tree_cost_matches_hand_value():
    two = validate_instance(2, [0.9, 0.5], [[0], [1]])
    bisect = Policy("bisect", "unconstrained")
    assert oracle.policy_expected_cost(two, bisect.select) == pytest.approx(1.1, abs=1e-12)


def test_optimum_never_beaten_by_any_fixed_order():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = 5
        inst = validate_instance(n, rng.uniform(0.1, 0.9, n), [[0, 1], [1, 2, 3], [4]])
        order = rng.permutation(n)
        fixed = oracle.policy_expected_cost(
            inst, lambda s: int(next(t for t in order if s.outcomes[t] == -1)))
        assert oracle.optimal_policy_cost(inst) <= fixed + 1e-12


def test_region_sequence_cost():
    inst = validate_instance(3, [0.5, 0.8, 0.9], [[0, 1], [2]])
    # region 0 first: 1 + 0.5, fails with prob 0.6, then region 1 costs 1
    assert oracle.region_sequence_cost(inst, [0, 1]) == pytest.approx(1.5 + 0.6, abs=1e-12)
    assert oracle.region_sequence_cost(inst, [1, 0]) == pytest.approx(1 + 0.1 * 1.5, abs=1e-12)
    assert oracle.optimal_region_sequence_cost(inst) == pytest.approx(1.15, abs=1e-12)
    assert oracle.greedy_region_sequence(inst) == [1, 0]


def test_region_greedy_bound_needs_unit_region_checks():
    # A long likely region ahead of a slightly less likely singleton: ordering
    # regions by posterior ignores how many tests each check costs.
    theta_long = 0.91 ** (1 / 9)
    inst = validate_instance(10, [theta_long] * 9 + [0.9], [list(range(9)), [9]])
    greedy = oracle.region_sequence_cost(inst, oracle.greedy_region_sequence(inst))
    best = oracle.optimal_region_sequence_cost(inst)
    assert greedy / best > 4.0
    # counting one unit per region check, greedy-by-posterior is optimal for independent regions
    unit = validate_instance(2, [0.91, 0.9], [[0], [1]])
    assert oracle.region_sequence_cost(unit, oracle.greedy_region_sequence(unit)) == \
        pytest.approx(oracle.optimal_region_sequence_cost(unit))


def test_min_hypothesis_prob():
    inst = validate_instance(2, [0.2, 0.7], [[0]])
    assert oracle.min_hypothesis_prob(inst) == pytest.approx(0.2 * 0.3)
    assert math.isfinite(math.log(1 / oracle.min_hypothesis_prob(inst)))
