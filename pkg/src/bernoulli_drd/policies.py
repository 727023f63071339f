"""Candidate-set selectors and test-selection rules.

A policy is a (rule, selector) pair spelled ``"<rule>:<selector>"``, e.g.
``"bisect:maxprob"``. Rules: ``bisect``, ``random``, ``maxtally``,
``setcover``, ``mvoi``. Selectors: ``unconstrained`` (tests of every live
region) and ``maxprob`` (tests of the single most probable region).

Ties always go to the lowest test id, and to the lowest region index when
picking the most probable region. Scores are rounded to 12 decimals before
the argmax so that last-bit noise cannot flip a selection.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .objective import normalized_gains

SCORE_DECIMALS = 12
RULES = ("bisect", "random", "maxtally", "setcover", "mvoi")
SELECTORS = ("unconstrained", "maxprob")


class PolicyError(ValueError):
    pass


class WrongSelector(PolicyError):
    pass


class EmptyCandidates(PolicyError):
    pass


class NoActiveRegion(PolicyError):
    pass


class NonUnitCost(PolicyError):
    pass


def most_probable_region(state):
    post = state.posteriors()
    if not np.any(post > 0.0):
        raise NoActiveRegion("every region has been invalidated")
    return int(np.argmax(post))


def candidate_set(state, selector="unconstrained"):
    """Unobserved tests eligible for selection, sorted ascending.

    ``unconstrained`` returns the union of tests of live regions;
    ``maxprob`` the tests of the most probable region.
    """
    unobserved = state.outcomes == -1
    if selector == "unconstrained":
        if not np.any(~state.killed):
            raise NoActiveRegion("every region has been invalidated")
        return np.flatnonzero((state.active_tally > 0) & unobserved)
    if selector == "maxprob":
        reg = state.instance.regions[most_probable_region(state)]
        return reg[unobserved[reg]]
    raise PolicyError(f"unknown selector {selector!r}")


def _argmax_lowest(candidates, scores):
    scores = np.round(np.asarray(scores, dtype=float), SCORE_DECIMALS)
    return int(candidates[int(np.argmax(scores))])


def _require(candidates):
    candidates = np.asarray(candidates, dtype=np.int64)
    if candidates.size == 0:
        raise EmptyCandidates("no candidate tests")
    return np.sort(candidates)


def _require_unit_cost(state, rule):
    if not state.instance.unit_cost:
        raise NonUnitCost(f"{rule} assumes unit test costs")


def bisect_scores(state, candidates):
    """Normalized greedy gain per unit cost for each candidate."""
    gains = normalized_gains(state, candidates)
    return gains / state.instance.cost[candidates]


def select_bisect(state, candidates):
    candidates = _require(candidates)
    return _argmax_lowest(candidates, bisect_scores(state, candidates))


def select_random(candidates, rng):
    candidates = _require(candidates)
    return int(candidates[rng.integers(candidates.size)])


def max_tally_scores(state, candidates):
    return state.active_tally[candidates].astype(float)


def select_max_tally(state, candidates):
    _require_unit_cost(state, "maxtally")
    candidates = _require(candidates)
    return _argmax_lowest(candidates, max_tally_scores(state, candidates))


def recount_tally(state):
    """Live-region tally recomputed from scratch (debug cross-check)."""
    inst = state.instance
    alive = ~state.killed[inst.pair_region]
    return np.bincount(inst.pair_test[alive], minlength=inst.num_tests)


def set_cover_scores(state, candidates):
    """``(1 - theta_t)`` times the number of tests that leave the live cover if ``t`` fails.

    A test ``u`` leaves the union of live-region tests when every live region
    containing ``u`` also contains ``t``. Observed tests and ``t`` itself are
    not counted.
    """
    inst = state.instance
    live = ~state.killed[inst.pair_region]
    rows = inst.pair_test[live]
    cols = inst.pair_region[live]
    inc = sp.csr_matrix((np.ones(rows.size), (rows, cols)),
                        shape=(inst.num_tests, inst.num_regions))
    co = (inc[candidates] @ inc.T).tocoo()
    u = co.col
    leaves = (co.data == state.active_tally[u]) & (state.outcomes[u] == -1) \
        & (u != candidates[co.row])
    counts = np.bincount(co.row[leaves], minlength=candidates.size)
    return (1.0 - inst.bias[candidates]) * counts


def select_set_cover(state, candidates):
    _require_unit_cost(state, "setcover")
    candidates = _require(candidates)
    return _argmax_lowest(candidates, set_cover_scores(state, candidates))


def mvoi_scores(state, candidates):
    """``(1 - theta_t)`` times the best region posterior if ``t`` fails."""
    inst = state.instance
    post = state.posteriors()
    order = np.argsort(-post, kind="stable")
    scores = np.empty(candidates.size)
    for i, t in enumerate(candidates):
        containing = set(inst.test_to_regions[t].tolist())
        best = 0.0
        for r in order:
            if post[r] <= 0.0:
                break
            if r not in containing:
                best = post[r]
                break
        scores[i] = (1.0 - inst.bias[t]) * best
    return scores


def select_mvoi(state, candidates, selector="maxprob"):
    if selector != "maxprob":
        raise WrongSelector("mvoi is only defined with the maxprob selector")
    _require_unit_cost(state, "mvoi")
    candidates = _require(candidates)
    return _argmax_lowest(candidates, mvoi_scores(state, candidates))


@dataclass(frozen=True)
class Policy:
    """A selection rule paired with a candidate selector."""

    rule: str
    selector: str = "unconstrained"

    def __post_init__(self):
        if self.rule not in RULES:
            raise PolicyError(f"unknown rule {self.rule!r}; expected one of {RULES}")
        if self.selector not in SELECTORS:
            raise PolicyError(f"unknown selector {self.selector!r}; expected one of {SELECTORS}")
        if self.rule == "mvoi" and self.selector != "maxprob":
            raise WrongSelector("mvoi is only defined with the maxprob selector")

    @property
    def name(self):
        return f"{self.rule}:{self.selector}"

    @property
    def deterministic(self):
        return self.rule != "random"

    def select(self, state, rng=None):
        """Next test to evaluate in ``state``."""
        cand = candidate_set(state, self.selector)
        if self.rule == "bisect":
            return select_bisect(state, cand)
        if self.rule == "random":
            _require_unit_cost(state, "random")
            if rng is None:
                raise PolicyError("the random rule needs an rng")
            return select_random(cand, rng)
        if self.rule == "maxtally":
            return select_max_tally(state, cand)
        if self.rule == "setcover":
            return select_set_cover(state, cand)
        return select_mvoi(state, cand, self.selector)

    def __str__(self):
        return self.name


def parse_policy(text):
    """Parse ``"rule:selector"``; a bare rule means ``unconstrained`` (``maxprob`` for mvoi)."""
    rule, _, selector = text.strip().lower().partition(":")
    if not selector:
        selector = "maxprob" if rule == "mvoi" else "unconstrained"
    return Policy(rule, selector)


ALL_POLICIES = tuple(
    Policy(rule, sel) for rule in RULES for sel in SELECTORS
    if not (rule == "mvoi" and sel == "unconstrained")
)
