"""Problem instances: tests with Bernoulli biases and costs, and regions over them.

A region is a set of tests that is valid when every one of its tests evaluates
to 1. Region order is preserved exactly as given; every tie-break elsewhere in
the package prefers the lowest index, so the order stored in an instance file
is meaningful.
"""

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

CLAMP_EPS = 1e-6


class InstanceError(ValueError):
    """Raised when raw instance data violates an instance invariant."""


class EmptyRegion(InstanceError):
    pass


class DuplicateRegion(InstanceError):
    pass


class BiasOutOfRange(InstanceError):
    pass


class NonPositiveCost(InstanceError):
    pass


class TestIdOutOfRange(InstanceError):
    __test__ = False  # keep pytest from collecting this as a test class


def _frozen(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """A validated decision-region problem.

    Build instances through :func:`validate_instance`; the constructor does
    not check anything.

    Attributes
    ----------
    num_tests : int
    bias : ndarray of float, shape (num_tests,)
        Probability that each test evaluates to 1; strictly inside (0, 1).
    cost : ndarray of float, shape (num_tests,)
    regions : tuple of ndarray of int
        Strictly increasing test ids of each region.
    meta : dict
        Free-form metadata carried through serialization.
    """

    num_tests: int
    bias: np.ndarray
    cost: np.ndarray
    regions: tuple
    meta: dict = field(default_factory=dict)

    @property
    def num_regions(self):
        return len(self.regions)

    @cached_property
    def region_sizes(self):
        return _frozen([len(r) for r in self.regions])

    @cached_property
    def pair_region(self):
        """Region index of every (region, test) membership pair."""
        return _frozen(np.repeat(np.arange(self.num_regions), self.region_sizes))

    @cached_property
    def pair_test(self):
        """Test id of every (region, test) membership pair."""
        if not self.regions:
            return _frozen(np.zeros(0, dtype=np.int64))
        return _frozen(np.concatenate(self.regions).astype(np.int64))

    @cached_property
    def test_to_regions(self):
        """Reverse index: for each test, the sorted regions containing it."""
        order = np.argsort(self.pair_test, kind="stable")
        tests = self.pair_test[order]
        regs = self.pair_region[order]
        bounds = np.searchsorted(tests, np.arange(self.num_tests + 1))
        return tuple(_frozen(regs[bounds[t]:bounds[t + 1]]) for t in range(self.num_tests))

    @cached_property
    def region_count(self):
        """Number of regions containing each test (including dead ones)."""
        return _frozen(np.bincount(self.pair_test, minlength=self.num_tests))

    @cached_property
    def unit_cost(self):
        return bool(np.all(self.cost == 1.0))

    def region_prior(self, r):
        """Probability that region ``r`` is valid: the product of its biases."""
        return float(np.prod(self.bias[self.regions[r]]))

    @cached_property
    def region_priors(self):
        return _frozen([self.region_prior(r) for r in range(self.num_regions)])

    def to_dict(self):
        d = {
            "num_tests": int(self.num_tests),
            "bias": [float(b) for b in self.bias],
            "cost": [float(c) for c in self.cost],
            "regions": [[int(t) for t in r] for r in self.regions],
            "meta": dict(self.meta),
        }
        return d


def validate_instance(num_tests, bias, regions, cost=None, meta=None, clamp=False):
    """Check raw instance data and build a :class:`ProblemInstance`.

    Parameters
    ----------
    num_tests : int
    bias : sequence of float
    regions : sequence of sequence of int
        Test ids of each region, in any order; duplicates within a region are
        an error.
    cost : sequence of float, optional
        Defaults to unit cost for every test.
    meta : dict, optional
    clamp : bool
        Clamp biases into ``[1e-6, 1 - 1e-6]`` instead of rejecting values
        outside the open unit interval. Off by default.

    Raises
    ------
    EmptyRegion, DuplicateRegion, BiasOutOfRange, NonPositiveCost, TestIdOutOfRange
    """
    num_tests = int(num_tests)
    if num_tests < 1:
        raise InstanceError(f"num_tests must be >= 1, got {num_tests}")
    bias = np.asarray(bias, dtype=float)
    if bias.shape != (num_tests,):
        raise InstanceError(f"bias has shape {bias.shape}, expected ({num_tests},)")
    if np.any(np.isnan(bias)):
        raise BiasOutOfRange("bias contains NaN")
    if clamp:
        bias = np.clip(bias, CLAMP_EPS, 1.0 - CLAMP_EPS)
    bad = np.flatnonzero((bias <= 0.0) | (bias >= 1.0))
    if bad.size:
        raise BiasOutOfRange(f"bias of test {bad[0]} is {bias[bad[0]]}, must lie in (0, 1)")

    if cost is None:
        cost = np.ones(num_tests)
    cost = np.asarray(cost, dtype=float)
    if cost.shape != (num_tests,):
        raise InstanceError(f"cost has shape {cost.shape}, expected ({num_tests},)")
    bad = np.flatnonzero(~(cost > 0.0))
    if bad.size:
        raise NonPositiveCost(f"cost of test {bad[0]} is {cost[bad[0]]}")

    regions = list(regions)
    if not regions:
        raise InstanceError("an instance needs at least one region")
    seen = {}
    clean = []
    for i, reg in enumerate(regions):
        ids = np.asarray(list(reg), dtype=np.int64)
        if ids.size == 0:
            raise EmptyRegion(f"region {i} is empty")
        if np.any(ids < 0) or np.any(ids >= num_tests):
            raise TestIdOutOfRange(f"region {i} references a test outside 0..{num_tests - 1}")
        ids = np.sort(ids)
        if np.any(np.diff(ids) == 0):
            raise InstanceError(f"region {i} lists a test twice")
        key = ids.tobytes()
        if key in seen:
            raise DuplicateRegion(f"regions {seen[key]} and {i} contain the same tests")
        seen[key] = i
        clean.append(_frozen(ids))

    return ProblemInstance(
        num_tests=num_tests,
        bias=_frozen(bias),
        cost=_frozen(cost),
        regions=tuple(clean),
        meta=dict(meta or {}),
    )


def instance_from_dict(d, clamp=False):
    return validate_instance(
        d["num_tests"], d["bias"], d["regions"], cost=d.get("cost"),
        meta=d.get("meta"), clamp=clamp,
    )


def save_instance(instance, path):
    with open(path, "w") as fh:
        json.dump(instance.to_dict(), fh, indent=1)
        fh.write("\n")


def load_instance(path, clamp=False):
    with open(path) as fh:
        return instance_from_dict(json.load(fh), clamp=clamp)


def region_prior(instance, r):
    return instance.region_prior(r)


def validate_ground_truth(instance, outcomes):
    """Return ``outcomes`` as an int8 vector after checking length and values."""
    x = np.asarray(outcomes)
    if x.shape != (instance.num_tests,):
        raise InstanceError(f"ground truth has shape {x.shape}, expected ({instance.num_tests},)")
    if not np.all((x == 0) | (x == 1)):
        raise InstanceError("ground truth entries must be 0 or 1")
    return x.astype(np.int8)


def valid_regions(instance, outcomes):
    """Indices of regions whose tests all evaluate to 1 under ``outcomes``."""
    x = np.asarray(outcomes)
    return [r for r, reg in enumerate(instance.regions) if np.all(x[reg] == 1)]
