"""Posterior bookkeeping under the independent Bernoulli prior.

For every region the state memoizes three factors that together give the
probability mass of the region's relevant version space:

* an indicator that no observed region test failed (``killed`` is its negation),
* the product of biases of the region's still-unobserved tests,
* the likelihood of the region's observed outcomes, kept both plain and squared.

Observing a test touches only the regions that contain it.
"""

from dataclasses import dataclass

import numpy as np

REFRESH_EVERY = 64
UNOBSERVED = -1


class AlreadyObserved(ValueError):
    pass


@dataclass(frozen=True)
class RegionBelief:
    """Snapshot of one region's memoized factors."""

    free_product: float
    killed: bool
    likelihood: float
    likelihood_sq: float
    num_unobserved: int


class BeliefState:
    """Mutable per-run belief over an instance.

    Attributes
    ----------
    outcomes : ndarray of int8
        Observed outcome per test, ``-1`` where unobserved.
    trace : list of (int, int)
        Observations in evaluation order.
    active_tally : ndarray of int
        Number of live (not killed) regions containing each test.
    """

    def __init__(self, instance):
        self.instance = instance
        n, m = instance.num_tests, instance.num_regions
        self.outcomes = np.full(n, UNOBSERVED, dtype=np.int8)
        self.trace = []
        self.free_product = np.array(instance.region_priors, dtype=float)
        self.killed = np.zeros(m, dtype=bool)
        self.likelihood = np.ones(m)
        self.likelihood_sq = np.ones(m)
        self.num_unobserved = np.array(instance.region_sizes, dtype=np.int64)
        self.active_tally = np.array(instance.region_count, dtype=np.int64)
        self._updates = np.zeros(m, dtype=np.int64)

    def copy(self):
        new = object.__new__(BeliefState)
        new.instance = self.instance
        new.outcomes = self.outcomes.copy()
        new.trace = list(self.trace)
        for name in ("free_product", "killed", "likelihood", "likelihood_sq",
                     "num_unobserved", "active_tally", "_updates"):
            setattr(new, name, getattr(self, name).copy())
        return new

    @property
    def observed_mask(self):
        return self.outcomes != UNOBSERVED

    def is_observed(self, t):
        return self.outcomes[t] != UNOBSERVED

    def observe(self, t, outcome):
        """Record ``outcome`` for test ``t`` and update the regions containing it."""
        t = int(t)
        outcome = int(outcome)
        if outcome not in (0, 1):
            raise ValueError(f"outcome must be 0 or 1, got {outcome}")
        if self.outcomes[t] != UNOBSERVED:
            raise AlreadyObserved(f"test {t} was already observed")
        self.outcomes[t] = outcome
        self.trace.append((t, outcome))

        inst = self.instance
        regs = inst.test_to_regions[t]
        if regs.size == 0:
            return
        theta = inst.bias[t]
        p = theta if outcome == 1 else 1.0 - theta
        self.free_product[regs] /= theta
        self.likelihood[regs] *= p
        self.likelihood_sq[regs] *= p * p
        self.num_unobserved[regs] -= 1
        if outcome == 0:
            newly = regs[~self.killed[regs]]
            self.killed[regs] = True
            for r in newly:
                np.subtract.at(self.active_tally, inst.regions[r], 1)
        self._updates[regs] += 1
        stale = regs[self._updates[regs] >= REFRESH_EVERY]
        for r in stale:
            self.refresh_region(r)

    def refresh_region(self, r):
        """Recompute region ``r``'s products from the raw observations."""
        reg = self.instance.regions[r]
        theta = self.instance.bias[reg]
        x = self.outcomes[reg]
        seen = x != UNOBSERVED
        lik = np.where(x == 1, theta, 1.0 - theta)[seen]
        self.free_product[r] = np.prod(theta[~seen])
        self.killed[r] = bool(np.any(x == 0))
        self.likelihood[r] = np.prod(lik)
        self.likelihood_sq[r] = np.prod(lik * lik)
        self.num_unobserved[r] = int(np.count_nonzero(~seen))
        self._updates[r] = 0

    def region(self, r):
        return RegionBelief(
            free_product=float(self.free_product[r]),
            killed=bool(self.killed[r]),
            likelihood=float(self.likelihood[r]),
            likelihood_sq=float(self.likelihood_sq[r]),
            num_unobserved=int(self.num_unobserved[r]),
        )

    def posteriors(self):
        """P(region valid | observations) for every region.

        Exactly 1 for fully observed surviving regions and exactly 0 for
        killed ones.
        """
        post = np.where(self.num_unobserved == 0, 1.0, self.free_product)
        return np.where(self.killed, 0.0, post)

    def validated(self):
        return np.flatnonzero(~self.killed & (self.num_unobserved == 0))

    def active_regions(self):
        """Regions with positive posterior."""
        return np.flatnonzero(~self.killed)


def init_belief(instance):
    return BeliefState(instance)


def belief_from_outcomes(instance, outcomes):
    """Build a state from a ``-1/0/1`` outcome vector or an ``(test, outcome)`` list."""
    state = BeliefState(instance)
    if isinstance(outcomes, dict):
        items = outcomes.items()
    elif isinstance(outcomes, np.ndarray) and outcomes.ndim == 1 and outcomes.dtype != object \
            and outcomes.shape == (instance.num_tests,):
        items = [(t, x) for t, x in enumerate(outcomes) if x != UNOBSERVED]
    else:
        items = list(outcomes)
    for t, x in items:
        state.observe(t, x)
    return state


def observe(state, t, outcome):
    state.observe(t, outcome)
    return state


def region_posterior(state, r):
    if state.killed[r]:
        return 0.0
    if state.num_unobserved[r] == 0:
        return 1.0
    return float(state.free_product[r])


def region_validity_mass(state, r):
    """Mass of hypotheses in the region's relevant version space where it is valid."""
    if state.killed[r]:
        return 0.0
    return region_posterior(state, r) * float(state.likelihood[r])


def region_invalidity_mass(state, r):
    """Mass of hypotheses in the region's relevant version space where it is invalid."""
    return (1.0 - region_posterior(state, r)) * float(state.likelihood[r])
