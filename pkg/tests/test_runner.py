import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bernoulli_drd import runner
from bernoulli_drd.datasets import gen_disparity
from bernoulli_drd.model import validate_instance
from bernoulli_drd.policies import ALL_POLICIES, Policy
from bernoulli_drd.seeding import make_rng

from conftest import instances

BISECT = Policy("bisect", "unconstrained")


def test_single_region_valid():
    inst = validate_instance(1, [0.5], [[0]])
    out = runner.run(inst, BISECT, [1])
    assert out.trace == [(0, 1)]
    assert (out.verdict, out.region, out.total_cost) == ("valid", 0, 1.0)


def test_all_invalid():
    inst = validate_instance(2, [0.5, 0.5], [[0], [1]])
    out = runner.run(inst, BISECT, [0, 0])
    assert out.verdict == "all_invalid" and out.region is None
    assert out.total_cost == 2.0


def test_disparity_unconstrained_checks_a_first():
    inst = gen_disparity()
    truth = np.ones(inst.num_tests, dtype=np.int8)
    out = runner.run(inst, BISECT, truth)
    assert out.trace == [(0, 1)] and out.total_cost == 1.0


class _InOrder:
    """Evaluates the lowest unobserved test."""

    name = "in-order"

    def select(self, state, rng=None):
        return int(np.flatnonzero(state.outcomes == -1)[0])


def test_lowest_region_reported_on_simultaneous_validation():
    # regions {1, 2} and {0, 2} both validate when test 2 passes last
    inst = validate_instance(3, [0.5] * 3, [[1, 2], [0, 2]])
    out = runner.run(inst, _InOrder(), [1, 1, 1])
    assert out.total_cost == 3.0
    assert out.region == 0 and out.validated == [0]


def test_check_all_mode():
    one = validate_instance(1, [0.5], [[0]])
    assert runner.run_check_all(one, BISECT, [1]).total_cost == 1.0
    two = validate_instance(2, [0.5, 0.5], [[0], [1]])
    out = runner.run_check_all(two, BISECT, [1, 1])
    assert out.total_cost == 2.0 and out.validated == [0, 1]
    shared = validate_instance(3, [0.5] * 3, [[0, 1], [0, 2]])
    sc = Policy("setcover", "unconstrained")
    out = runner.run_check_all(shared, sc, [0, 1, 1])
    assert out.total_cost == 1.0 and out.verdict == "all_invalid"


def test_trace_records_fdrd():
    inst = validate_instance(3, [0.5, 0.6, 0.7], [[0, 1], [2]])
    out = runner.run(inst, BISECT, [1, 1, 1], record_fdrd=True)
    assert len(out.fdrd_trajectory) == len(out.trace)
    assert out.fdrd_trajectory[-1] == 1.0
    d = out.to_dict()
    assert d["fdrd_trajectory"] == out.fdrd_trajectory


class _Stubborn:
    name = "stubborn"

    def select(self, state, rng=None):
        return 0


def test_policy_returning_observed_test_is_caught():
    inst = validate_instance(2, [0.5, 0.5], [[0, 1]])
    with pytest.raises(runner.PolicyReturnedObservedTest):
        runner.run(inst, _Stubborn(), [1, 1])


@settings(max_examples=150, deadline=None)
@given(instances(max_tests=10), st.integers(0, 2 ** 32 - 1), st.sampled_from(ALL_POLICIES))
def test_verdicts_are_sound_and_complete(inst, seed, policy):
    rng = np.random.default_rng(seed)
    truth = (rng.random(inst.num_tests) < inst.bias).astype(np.int8)
    out = runner.run(inst, policy, truth, rng=make_rng(seed, "p"), record_fdrd=True)
    tested = dict(out.trace)
    assert len(tested) == len(out.trace) <= inst.num_tests
    assert out.total_cost == pytest.approx(sum(inst.cost[t] for t in tested))
    assert all(truth[t] == x for t, x in tested.items())
    if out.verdict == "valid":
        assert all(tested.get(int(t)) == 1 for t in inst.regions[out.region])
        assert out.fdrd_trajectory[-1] == 1.0
    else:
        assert all(any(tested.get(int(t)) == 0 for t in r) for r in inst.regions)
        assert all(v < 1.0 for v in out.fdrd_trajectory)
    traj = out.fdrd_trajectory
    assert all(b >= a - 1e-12 for a, b in zip(traj, traj[1:]))
    if policy.deterministic:
        assert runner.run(inst, policy, truth).trace == out.trace


def test_expected_cost_single_test():
    inst = validate_instance(1, [0.5], [[0]])
    mean, err = runner.expected_cost(inst, BISECT, "all", 50, 3)
    assert (mean, err) == (1.0, 0.0)


def test_expected_cost_is_reproducible():
    inst = validate_instance(4, [0.3, 0.6, 0.5, 0.8], [[0, 1], [2, 3], [1, 2]])
    rnd = Policy("random", "unconstrained")
    a = runner.expected_cost(inst, rnd, "at_least_one_valid", 200, 11)
    b = runner.expected_cost(inst, rnd, "at_least_one_valid", 200, 11)
    assert a == b


def test_conditioned_sampling():
    inst = validate_instance(3, [0.1, 0.1, 0.1], [[0, 1], [2]])
    truths = runner.sample_truths(inst, 50, 0, "at_least_one_valid")
    assert runner.any_region_valid(inst, truths).all()
    assert np.array_equal(truths, runner.sample_truths(inst, 50, 0, "at_least_one_valid"))


def test_rejection_cap():
    inst = validate_instance(20, [0.01] * 20, [list(range(20))])
    with pytest.raises(runner.RejectionCapExceeded) as exc:
        runner.sample_truths(inst, 1, 0, "at_least_one_valid", cap=1000)
    assert "acceptance rate" in str(exc.value)


def test_unknown_conditioning():
    inst = validate_instance(1, [0.5], [[0]])
    with pytest.raises(ValueError):
        runner.sample_truth(inst, np.random.default_rng(0), "sometimes")
