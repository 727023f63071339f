"""Exponential-cost reference computations used to verify the fast paths.

Nothing here reuses the closed forms in :mod:`belief` or :mod:`objective`:
probabilities come from explicitly enumerating every outcome vector, edge
weights from explicit subregion construction, and optimal costs from dynamic
programming over observation states.
"""

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .belief import BeliefState

MAX_ENUM_TESTS = 20
MAX_WEC_TESTS = 12
MAX_DP_TESTS = 10
MAX_DP_REGIONS = 5


class TooManyTests(ValueError):
    pass


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class HypothesisTable:
    """All ``2**num_tests`` outcome vectors and their prior probabilities."""

    outcomes: np.ndarray  # (2**n, n) int8
    prob: np.ndarray  # (2**n,)

    def __len__(self):
        return self.prob.size

    def consistent(self, observed, tests=None):
        """Mask of rows agreeing with ``observed`` (a -1/0/1 vector).

        When ``tests`` is given only those tests are compared, which yields a
        region's relevant version space.
        """
        observed = np.asarray(observed)
        idx = np.flatnonzero(observed != -1)
        if tests is not None:
            idx = np.intersect1d(idx, np.asarray(tests))
        if idx.size == 0:
            return np.ones(len(self), dtype=bool)
        return np.all(self.outcomes[:, idx] == observed[idx], axis=1)

    def region_valid(self, region):
        return np.all(self.outcomes[:, region] == 1, axis=1)


def enumerate_hypotheses(instance):
    n = instance.num_tests
    if n > MAX_ENUM_TESTS:
        raise TooManyTests(f"enumeration is capped at {MAX_ENUM_TESTS} tests, got {n}")
    codes = np.arange(2 ** n, dtype=np.int64)
    outcomes = ((codes[:, None] >> np.arange(n)) & 1).astype(np.int8)
    theta = np.asarray(instance.bias)
    prob = np.prod(np.where(outcomes == 1, theta, 1.0 - theta), axis=1)
    return HypothesisTable(outcomes=outcomes, prob=prob)


def _as_outcome_vector(instance, observed):
    if observed is None:
        return np.full(instance.num_tests, -1, dtype=np.int8)
    if isinstance(observed, BeliefState):
        return observed.outcomes.copy()
    if isinstance(observed, dict):
        vec = np.full(instance.num_tests, -1, dtype=np.int8)
        for t, x in observed.items():
            vec[t] = x
        return vec
    return np.asarray(observed, dtype=np.int8)


def enum_region_prior(instance, r, table=None):
    table = table or enumerate_hypotheses(instance)
    return float(table.prob[table.region_valid(instance.regions[r])].sum())


def enum_region_masses(instance, r, observed=None, table=None):
    """(valid mass, invalid mass) of region ``r``'s relevant version space."""
    table = table or enumerate_hypotheses(instance)
    obs = _as_outcome_vector(instance, observed)
    reg = instance.regions[r]
    rel = table.consistent(obs, reg)
    inside = table.region_valid(reg)
    return float(table.prob[rel & inside].sum()), float(table.prob[rel & ~inside].sum())


def enum_region_posterior(instance, r, observed=None, table=None):
    """P(region valid | observations) using the full version space."""
    table = table or enumerate_hypotheses(instance)
    obs = _as_outcome_vector(instance, observed)
    vs = table.consistent(obs)
    inside = table.region_valid(instance.regions[r])
    return float(table.prob[vs & inside].sum() / table.prob[vs].sum())


def naive_wec(instance, r, observed=None, table=None):
    """Edge weight of region ``r``'s subproblem by explicit subregion construction.

    Subregion 1 holds every hypothesis where the region is valid; every other
    hypothesis is its own subregion. Edges join subregion 1 to each other
    subregion, and every pair of the singleton subregions, self-pairs
    included. Only hypotheses in the relevant version space survive pruning.
    """
    if instance.num_tests > MAX_WEC_TESTS:
        raise TooManyTests(f"naive_wec is capped at {MAX_WEC_TESTS} tests")
    table = table or enumerate_hypotheses(instance)
    obs = _as_outcome_vector(instance, observed)
    reg = instance.regions[r]
    rel = table.consistent(obs, reg)
    inside = table.region_valid(reg)
    s1 = table.prob[rel & inside].sum()
    singles = table.prob[rel & ~inside]
    singles_total = math.fsum(singles)
    weight = 0.0
    for p in singles:
        # one edge to subregion 1, then one to every singleton, itself included
        weight += s1 * p + p * singles_total
    return float(weight)


def golovin_uniform_wec(instance, r):
    """Uniform-prior shortcut weight, without self-edges, for the unpruned problem."""
    table = enumerate_hypotheses(instance)
    inside = table.region_valid(instance.regions[r])
    p1 = table.prob[inside].sum()
    pn = table.prob[~inside].sum()
    return float(p1 * pn + pn * (pn - 1.0 / len(table)))


def enum_f_ec(instance, r, observed=None, table=None):
    table = table or enumerate_hypotheses(instance)
    return 1.0 - naive_wec(instance, r, observed, table) / naive_wec(instance, r, None, table)


def enum_f_drd(instance, observed=None, table=None):
    table = table or enumerate_hypotheses(instance)
    prod = 1.0
    for r in range(instance.num_regions):
        prod *= 1.0 - enum_f_ec(instance, r, observed, table)
    return 1.0 - prod


def enum_expected_delta(instance, observed, t, table=None):
    """Expected increase of the enumerated Noisy-OR objective when observing ``t``.

    The outcome of ``t`` is drawn from its posterior given ``observed``, which
    under independence is its prior bias.
    """
    table = table or enumerate_hypotheses(instance)
    obs = _as_outcome_vector(instance, observed)
    base = enum_f_drd(instance, obs, table)
    vs = table.consistent(obs)
    p1 = table.prob[vs & (table.outcomes[:, t] == 1)].sum() / table.prob[vs].sum()
    total = 0.0
    for x, px in ((1, p1), (0, 1.0 - p1)):
        nxt = obs.copy()
        nxt[t] = x
        total += px * (enum_f_drd(instance, nxt, table) - base)
    return float(total)


def min_hypothesis_prob(instance):
    theta = np.asarray(instance.bias)
    return float(np.prod(np.minimum(theta, 1.0 - theta)))


def _dp_check(instance):
    if instance.num_tests > MAX_DP_TESTS or instance.num_regions > MAX_DP_REGIONS:
        raise TooLarge(
            f"optimal_policy_cost is capped at {MAX_DP_TESTS} tests and {MAX_DP_REGIONS} regions"
        )


def _region_status(instance, key):
    """Per region: 0 killed, 1 validated, 2 undecided, for a ternary state key."""
    status = []
    for reg in instance.regions:
        vals = [key[t] for t in reg]
        if 0 in vals:
            status.append(0)
        elif all(v == 1 for v in vals):
            status.append(1)
        else:
            status.append(2)
    return status


def is_terminal(instance, key, mode):
    status = _region_status(instance, key)
    if mode == "identify_one":
        return 1 in status or all(s == 0 for s in status)
    if mode == "check_all":
        return all(s != 2 for s in status)
    raise ValueError(f"unknown mode {mode!r}")


def optimal_policy_cost(instance, mode="identify_one"):
    """Minimum expected cost over all adaptive policies, by exhaustive DP.

    States are ternary outcome strings (-1 unobserved). Only tests of
    undecided regions are considered as actions; any other test cannot change
    which terminal condition is reached.

    Parameters
    ----------
    mode : {"identify_one", "check_all"}
        ``identify_one`` stops once a region is proven valid or every region
        is invalid; ``check_all`` stops once every region is proven valid or
        invalid.
    """
    _dp_check(instance)
    theta = [float(b) for b in instance.bias]
    cost = [float(c) for c in instance.cost]
    regions = [tuple(int(t) for t in r) for r in instance.regions]

    @lru_cache(maxsize=None)
    def value(key):
        if is_terminal(instance, key, mode):
            return 0.0
        status = _region_status(instance, key)
        actions = sorted({t for r, s in zip(regions, status) if s == 2 for t in r if key[t] == -1})
        best = math.inf
        for t in actions:
            k1 = key[:t] + (1,) + key[t + 1:]
            k0 = key[:t] + (0,) + key[t + 1:]
            v = cost[t] + theta[t] * value(k1) + (1.0 - theta[t]) * value(k0)
            if v < best:
                best = v
        return best

    return value(tuple([-1] * instance.num_tests))


def policy_expected_cost(instance, choose, mode="identify_one"):
    """Exact expected cost of a deterministic policy by expanding its decision tree.

    ``choose(state)`` returns the next test for a non-terminal
    :class:`~bernoulli_drd.belief.BeliefState`.
    """
    if instance.num_tests > MAX_ENUM_TESTS:
        raise TooManyTests("policy tree expansion is capped at 20 tests")
    theta = instance.bias
    cost = instance.cost

    def expand(state):
        if is_terminal(instance, tuple(int(v) for v in state.outcomes), mode):
            return 0.0
        t = choose(state)
        total = float(cost[t])
        for x, px in ((1, theta[t]), (0, 1.0 - theta[t])):
            child = state.copy()
            child.observe(t, x)
            total += px * expand(child)
        return total

    return expand(BeliefState(instance))


def region_sequence_cost(instance, order):
    """Expected cost of checking whole disjoint regions one after another.

    Inside a region tests run in ascending bias (fail-fast) and the region is
    abandoned at its first failure; the sequence stops at the first valid
    region.
    """
    theta = instance.bias
    cost = instance.cost
    total = 0.0
    reach = 1.0
    for r in order:
        tests = sorted(instance.regions[r], key=lambda t: (theta[t], t))
        alive = 1.0
        expected = 0.0
        for t in tests:
            expected += alive * cost[t]
            alive *= theta[t]
        total += reach * expected
        reach *= 1.0 - alive
    return float(total)


def optimal_region_sequence_cost(instance):
    """Cheapest :func:`region_sequence_cost` over every region order."""
    if instance.num_regions > 8:
        raise TooLarge("region permutations are capped at 8 regions")
    return min(region_sequence_cost(instance, order)
               for order in itertools.permutations(range(instance.num_regions)))


def greedy_region_sequence(instance):
    """Regions by decreasing posterior; for disjoint regions the posterior is the prior."""
    priors = np.asarray(instance.region_priors)
    return sorted(range(instance.num_regions), key=lambda r: (-priors[r], r))
