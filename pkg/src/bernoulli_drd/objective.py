"""Edge-cutting objectives and the greedy marginal gain.

Each region defines a "one region versus all" subproblem whose edge-cutting
objective has a closed form under independent Bernoulli tests. The
subproblems are combined with a Noisy-OR, and the greedy gain of a test only
depends on the regions that contain it.

Two gain scales are exposed. :func:`marginal_gain` is the unnormalized bracket
``E[prod_r pf_r - prod_r pf_r' * lik_t^(2 n_t)]``; :func:`normalized_gains`
divides it by ``prod_r pf_r``, which is common to every test, so both share
the same argmax. Selection uses the normalized form because the full product
underflows on large instances.
"""

import math

import numpy as np

from .belief import AlreadyObserved


def wec_initial(instance, r):
    """Initial edge weight of region ``r``'s subproblem with self-edges."""
    return 1.0 - instance.region_prior(r)


def wec_initial_all(instance):
    return 1.0 - np.asarray(instance.region_priors)


def pruned_factors(state):
    """``1 - indicator * free_product`` per region (1 for killed regions)."""
    return 1.0 - state.posteriors()


def wec_pruned(state, r):
    """Remaining edge weight of region ``r``'s subproblem after pruning."""
    post = 0.0 if state.killed[r] else (1.0 if state.num_unobserved[r] == 0 else state.free_product[r])
    return (1.0 - post) * float(state.likelihood_sq[r])


def wec_pruned_all(state):
    return pruned_factors(state) * state.likelihood_sq


def f_ec(state, r):
    """Fraction of region ``r``'s edge weight cut so far, in [0, 1]."""
    pruned = wec_pruned(state, r)
    if pruned == 0.0:
        return 1.0
    return 1.0 - pruned / wec_initial(state.instance, r)


def f_ec_all(state):
    pruned = wec_pruned_all(state)
    return np.where(pruned == 0.0, 1.0, 1.0 - pruned / wec_initial_all(state.instance))


def log_residual(state):
    """``log prod_r (1 - f_ec(r))``; ``-inf`` once some region is validated."""
    pruned = wec_pruned_all(state)
    if np.any(pruned == 0.0):
        return -math.inf
    return float(np.sum(np.log(pruned) - np.log(wec_initial_all(state.instance))))


def f_drd(state):
    """Noisy-OR combination ``1 - prod_r (1 - f_ec(r))``.

    Equals 1 exactly when some region is validated and stays strictly below
    1 otherwise, even when the product underflows.
    """
    lr = log_residual(state)
    if lr == -math.inf:
        return 1.0
    return min(-math.expm1(lr), math.nextafter(1.0, 0.0))


def _check_unobserved(state, tests):
    seen = state.outcomes[tests] != -1
    if np.any(seen):
        raise AlreadyObserved(f"test {int(np.asarray(tests)[seen][0])} was already observed")


def _pair_arrays(state, tests):
    inst = state.instance
    if tests is None:
        return inst.pair_test, inst.pair_region
    tests = np.asarray(tests, dtype=np.int64)
    regs = [inst.test_to_regions[t] for t in tests]
    counts = np.array([r.size for r in regs], dtype=np.int64)
    pt = np.repeat(tests, counts)
    pr = np.concatenate(regs) if regs else np.zeros(0, dtype=np.int64)
    return pt, pr


def normalized_gains(state, tests=None):
    """Greedy gain of each test divided by ``prod_r pf_r``.

    Parameters
    ----------
    state : BeliefState
    tests : array of int, optional
        Unobserved tests to score. Defaults to every test; observed tests then
        get meaningless values and must be masked by the caller.

    Returns
    -------
    ndarray of float
        ``1 - rho(t)`` where ``rho`` is the expected residual ratio of the
        Noisy-OR product after observing ``t``.
    """
    inst = state.instance
    all_tests = tests is None
    if not all_tests:
        tests = np.asarray(tests, dtype=np.int64)
        _check_unobserved(state, tests)
    pt, pr = _pair_arrays(state, tests)

    alive = ~state.killed[pr]
    fp = state.free_product[pr]
    last = state.num_unobserved[pr] == 1
    theta_p = inst.bias[pt]
    with np.errstate(divide="ignore", invalid="ignore"):
        after_pass = np.where(last, 0.0, 1.0 - fp / theta_p)
        log1 = np.where(alive, np.log(np.maximum(after_pass, 0.0)) - np.log1p(-fp), 0.0)
        log0 = np.where(alive, -np.log1p(-fp), 0.0)

    if all_tests:
        n = inst.num_tests
        s1 = np.zeros(n)
        s0 = np.zeros(n)
        np.add.at(s1, pt, log1)
        np.add.at(s0, pt, log0)
        theta = np.asarray(inst.bias)
        counts = np.asarray(inst.region_count)
    else:
        idx = np.repeat(np.arange(tests.size), [inst.test_to_regions[t].size for t in tests])
        s1 = np.zeros(tests.size)
        s0 = np.zeros(tests.size)
        np.add.at(s1, idx, log1)
        np.add.at(s0, idx, log0)
        theta = inst.bias[tests]
        counts = inst.region_count[tests]

    expo = 1.0 + 2.0 * counts
    with np.errstate(divide="ignore"):
        rho = np.exp(expo * np.log(theta) + s1) + np.exp(expo * np.log1p(-theta) + s0)
    return 1.0 - rho


def normalized_gain(state, t):
    return float(normalized_gains(state, [t])[0])


def marginal_gain(state, t):
    """Unnormalized expected gain of test ``t``.

    ``E_x[prod_r pf_r - prod_r pf_r(after x) * lik_t(x)^(2 n_t)]`` where
    ``n_t`` counts every region containing ``t``. Returns 0 for a test in no
    region. May underflow to 0 on instances with many regions; use
    :func:`normalized_gains` for selection.
    """
    if state.outcomes[t] != -1:
        raise AlreadyObserved(f"test {t} was already observed")
    pf = pruned_factors(state)
    if np.any(pf == 0.0):
        return 0.0
    total = float(np.exp(np.sum(np.log(pf))))
    return total * normalized_gain(state, t)
