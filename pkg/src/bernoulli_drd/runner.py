"""Run a policy against a ground truth until a region is proven valid or all fail."""

from dataclasses import dataclass, field

import numpy as np

from .belief import BeliefState
from .model import validate_ground_truth
from .objective import f_drd
from .seeding import make_rng

REJECTION_CAP = 10 ** 6


class PolicyReturnedObservedTest(RuntimeError):
    pass


class RejectionCapExceeded(RuntimeError):
    def __init__(self, attempts, accepted):
        self.attempts = attempts
        self.accepted = accepted
        rate = accepted / attempts if attempts else 0.0
        super().__init__(
            f"rejection sampling gave up after {attempts} attempts "
            f"(acceptance rate {rate:.3g})"
        )


@dataclass
class RunResult:
    """Outcome of one run.

    ``region`` is the validated region for ``verdict == "valid"`` and
    ``None`` for ``"all_invalid"`` (and for check-all runs, where
    ``validated`` lists every region proven valid).
    """

    trace: list
    total_cost: float
    verdict: str
    region: int = None
    validated: list = field(default_factory=list)
    fdrd_trajectory: list = None

    def to_dict(self):
        d = {
            "trace": [[int(t), int(x)] for t, x in self.trace],
            "total_cost": float(self.total_cost),
            "verdict": self.verdict,
            "region": self.region,
            "validated": [int(r) for r in self.validated],
        }
        if self.fdrd_trajectory is not None:
            d["fdrd_trajectory"] = [float(v) for v in self.fdrd_trajectory]
        return d


def _loop(instance, policy, truth, rng, record_fdrd, check_all):
    truth = validate_ground_truth(instance, truth)
    state = BeliefState(instance)
    traj = [] if record_fdrd else None
    cost = 0.0
    while True:
        validated = state.validated()
        if check_all:
            if np.all(state.killed | (state.num_unobserved == 0)):
                verdict = "valid" if validated.size else "all_invalid"
                return state, RunResult(state.trace, cost, verdict, None, validated.tolist(), traj)
        else:
            if validated.size:
                r = int(validated[0])
                return state, RunResult(state.trace, cost, "valid", r, [r], traj)
            if np.all(state.killed):
                return state, RunResult(state.trace, cost, "all_invalid", None, [], traj)
        t = policy.select(state, rng)
        if state.outcomes[t] != -1:
            raise PolicyReturnedObservedTest(f"{policy} picked observed test {t}")
        state.observe(t, truth[t])
        cost += float(instance.cost[t])
        if record_fdrd:
            traj.append(f_drd(state))


def run(instance, policy, truth, rng=None, record_fdrd=False):
    """Evaluate tests chosen by ``policy`` until the decision is made.

    Stops with ``verdict="valid"`` (lowest validated region index) as soon as
    some region has every test observed as 1, or with ``"all_invalid"`` once
    every region has a failed test.
    """
    return _loop(instance, policy, truth, rng, record_fdrd, check_all=False)[1]


def run_check_all(instance, policy, truth, rng=None, record_fdrd=False):
    """Like :func:`run` but continue until every region is proven valid or invalid."""
    return _loop(instance, policy, truth, rng, record_fdrd, check_all=True)[1]


def any_region_valid(instance, truths):
    """Boolean per row of ``truths``: does some region validate?"""
    truths = np.atleast_2d(truths)
    ok = np.zeros(truths.shape[0], dtype=bool)
    for reg in instance.regions:
        ok |= np.all(truths[:, reg] == 1, axis=1)
    return ok


def sample_truth(instance, rng, conditioning="all", cap=REJECTION_CAP, block=64):
    """Draw one ground truth from the prior, optionally conditioned on a valid region.

    Returns ``(truth, attempts)``.
    """
    theta = np.asarray(instance.bias)
    if conditioning == "all":
        return (rng.random(instance.num_tests) < theta).astype(np.int8), 1
    if conditioning != "at_least_one_valid":
        raise ValueError(f"unknown conditioning {conditioning!r}")
    attempts = 0
    while attempts < cap:
        n = min(block, cap - attempts)
        draws = (rng.random((n, instance.num_tests)) < theta).astype(np.int8)
        ok = np.flatnonzero(any_region_valid(instance, draws))
        if ok.size:
            return draws[ok[0]], attempts + int(ok[0]) + 1
        attempts += n
    raise RejectionCapExceeded(attempts, 0)


def sample_truths(instance, num, master_seed, conditioning="all", label="truth",
                  cap=REJECTION_CAP):
    """``num`` ground truths, row ``i`` drawn from its own derived stream."""
    rows = []
    attempts = 0
    for i in range(num):
        remaining = cap - attempts
        if remaining <= 0:
            raise RejectionCapExceeded(attempts, i)
        try:
            x, used = sample_truth(instance, make_rng(master_seed, label, i),
                                   conditioning, cap=remaining)
        except RejectionCapExceeded:
            raise RejectionCapExceeded(cap, i) from None
        attempts += used
        rows.append(x)
    return np.array(rows, dtype=np.int8).reshape(num, instance.num_tests)


def expected_cost(instance, policy, conditioning="all", num_trials=1000, master_seed=0):
    """Monte Carlo estimate of a policy's expected cost.

    Returns ``(mean, stderr)``. Trial ``i`` uses ground truth and policy
    streams derived from ``(master_seed, i)``, so the estimate does not depend
    on evaluation order.
    """
    if num_trials < 1:
        raise ValueError("num_trials must be >= 1")
    truths = sample_truths(instance, num_trials, master_seed, conditioning)
    costs = np.empty(num_trials)
    for i in range(num_trials):
        rng = make_rng(master_seed, "policy", i)
        costs[i] = run(instance, policy, truths[i], rng=rng).total_cost
    mean = float(np.sum(costs) / num_trials)
    stderr = float(np.std(costs, ddof=1) / np.sqrt(num_trials)) if num_trials > 1 else 0.0
    return mean, stderr
