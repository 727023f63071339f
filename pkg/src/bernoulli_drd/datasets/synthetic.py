"""Synthetic Bernoulli instances and the region-size disparity instance."""

import math

import numpy as np

from ..model import validate_instance
from ..runner import sample_truths
from ..seeding import make_rng
from .bundle import DatasetBundle


class InvalidParams(ValueError):
    pass


def gen_synthetic_instance(num_tests=100, num_regions=100, seed=0, bias_range=(0.1, 0.9)):
    """Random regions of size ``U[ceil(0.05 n), floor(0.10 n)]`` over ``n`` tests.

    Biases are drawn from ``U[bias_range]``. A draw that repeats an existing
    region is redrawn so that regions stay distinct.
    """
    if num_tests < 20:
        raise InvalidParams("synthetic instances need at least 20 tests")
    lo = math.ceil(0.05 * num_tests)
    hi = math.floor(0.10 * num_tests)
    rng = make_rng(seed, "synthetic")
    theta = rng.uniform(bias_range[0], bias_range[1], size=num_tests)
    regions = []
    seen = set()
    while len(regions) < num_regions:
        size = int(rng.integers(lo, hi + 1))
        reg = tuple(sorted(int(t) for t in rng.choice(num_tests, size=size, replace=False)))
        if reg in seen:
            continue
        seen.add(reg)
        regions.append(reg)
    meta = {"generator": "synthetic", "num_regions": num_regions, "seed": seed}
    return validate_instance(num_tests, theta, regions, meta=meta)


def gen_synthetic(num_tests=100, num_regions=100, num_problems=100, seed=0,
                  conditioning="at_least_one_valid"):
    inst = gen_synthetic_instance(num_tests, num_regions, seed)
    truths = sample_truths(inst, num_problems, seed, conditioning, label="synthetic-truth")
    prov = {
        "generator": "synthetic",
        "params": {"num_tests": num_tests, "num_regions": num_regions,
                   "num_problems": num_problems, "conditioning": conditioning},
        "seed": seed,
    }
    return DatasetBundle(inst, truths, prov)


def gen_disparity(T=10, theta_a=0.9, epsilon=0.01):
    """Two regions: ``{a}`` and ``T`` tests ``b_i`` with ``theta_b**T = theta_a + epsilon``.

    Test 0 is ``a``; tests ``1..T`` are the ``b_i``. All costs are 1.
    """
    if T < 1 or not (0.0 < theta_a < 1.0) or not (theta_a + epsilon < 1.0) \
            or theta_a + epsilon <= 0.0:
        raise InvalidParams(f"need T >= 1 and 0 < theta_a, theta_a + epsilon < 1 "
                            f"(got T={T}, theta_a={theta_a}, epsilon={epsilon})")
    theta_b = (theta_a + epsilon) ** (1.0 / T)
    bias = [theta_a] + [theta_b] * T
    regions = [[0], list(range(1, T + 1))]
    meta = {"generator": "disparity", "T": T, "theta_a": theta_a, "epsilon": epsilon,
            "theta_b": theta_b}
    return validate_instance(T + 1, bias, regions, meta=meta)


def disparity_bundle(num_problems=1000, seed=0, conditioning="at_least_one_valid",
                     T=10, theta_a=0.9, epsilon=0.01):
    inst = gen_disparity(T, theta_a, epsilon)
    truths = sample_truths(inst, num_problems, seed, conditioning, label="disparity-truth")
    prov = {
        "generator": "disparity",
        "params": {"T": T, "theta_a": theta_a, "epsilon": epsilon,
                   "num_problems": num_problems, "conditioning": conditioning},
        "seed": seed,
    }
    return DatasetBundle(inst, truths, prov)
