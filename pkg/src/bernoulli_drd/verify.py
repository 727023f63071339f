"""Randomized property suites comparing the fast paths with the oracle.

Each suite draws small random instances from a seeded stream, checks one
family of properties, and reports the number of checks, violations and the
worst observed margin (``bound - value``; negative means violated).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import belief as bl
from . import objective as obj
from . import oracle
from .model import validate_instance
from .policies import Policy, candidate_set, select_bisect
from .runner import run
from .seeding import make_rng

TOL = 1e-9


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    violations: int = 0
    worst_margin: float = math.inf
    notes: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.violations == 0 and self.checks > 0

    def record(self, margin, tol=0.0):
        self.checks += 1
        if margin < self.worst_margin:
            self.worst_margin = float(margin)
        if margin < -tol:
            self.violations += 1

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: {self.checks} checks, {self.violations} violations, "
                f"worst margin {self.worst_margin:.3g}")


def random_instance(rng, max_tests=12, max_regions=4, min_tests=1, bias_range=(0.1, 0.9),
                    max_region_size=None, unit_cost=True, disjoint=False):
    """Small random instance with distinct regions."""
    n = int(rng.integers(min_tests, max_tests + 1))
    theta = rng.uniform(bias_range[0], bias_range[1], size=n)
    cost = None if unit_cost else rng.uniform(0.5, 2.0, size=n)
    cap = min(n, max_region_size or n)
    if disjoint:
        m = int(rng.integers(1, min(max_regions, n) + 1))
        perm = rng.permutation(n)
        cuts = np.sort(rng.choice(np.arange(1, n), size=m - 1, replace=False)) if m > 1 else []
        regions = [sorted(p.tolist()) for p in np.split(perm, cuts)]
        regions = [r[:cap] for r in regions]
        return validate_instance(n, theta, regions, cost=cost)
    m_target = int(rng.integers(1, max_regions + 1))
    regions = []
    seen = set()
    for _ in range(50 * m_target):
        if len(regions) == m_target:
            break
        size = int(rng.integers(1, cap + 1))
        reg = tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
        if reg not in seen:
            seen.add(reg)
            regions.append(list(reg))
    return validate_instance(n, theta, regions, cost=cost)


def random_trajectory(instance, rng):
    """Ground truth from the prior and a random evaluation order of all tests."""
    truth = (rng.random(instance.num_tests) < instance.bias).astype(np.int8)
    order = rng.permutation(instance.num_tests)
    return truth, order


def random_state(instance, rng, nonterminal=False):
    for _ in range(100):
        truth, order = random_trajectory(instance, rng)
        k = int(rng.integers(0, instance.num_tests + 1))
        state = bl.BeliefState(instance)
        for t in order[:k]:
            state.observe(t, truth[t])
        if not nonterminal:
            return state
        if state.validated().size == 0 and not np.all(state.killed):
            return state
    return bl.BeliefState(instance)


def suite_equivalence(num_instances=1000, max_tests=12, max_regions=4, seed=0, f_ec_fn=None):
    """Closed-form belief and objective values against hypothesis enumeration."""
    f_ec_fn = f_ec_fn or obj.f_ec
    res = SuiteResult("equivalence")
    rng = make_rng(seed, "suite-equivalence")
    for _ in range(num_instances):
        inst = random_instance(rng, max_tests, max_regions)
        table = oracle.enumerate_hypotheses(inst)
        state = random_state(inst, rng)
        obs = state.outcomes
        fdrd_prod = 1.0
        for r in range(inst.num_regions):
            res.record(-abs(inst.region_prior(r) - oracle.enum_region_prior(inst, r, table)), TOL)
            v, iv = oracle.enum_region_masses(inst, r, obs, table)
            res.record(-abs(bl.region_validity_mass(state, r) - v), TOL)
            res.record(-abs(bl.region_invalidity_mass(state, r) - iv), TOL)
            res.record(-abs(bl.region_posterior(state, r)
                            - oracle.enum_region_posterior(inst, r, obs, table)), TOL)
            w0 = oracle.naive_wec(inst, r, None, table)
            w = oracle.naive_wec(inst, r, obs, table)
            res.record(-abs(obj.wec_initial(inst, r) - w0), TOL)
            res.record(-abs(obj.wec_pruned(state, r) - w), TOL)
            fec = 1.0 - w / w0
            res.record(-abs(f_ec_fn(state, r) - fec), TOL)
            fdrd_prod *= 1.0 - fec
        res.record(-abs(obj.f_drd(state) - (1.0 - fdrd_prod)), TOL)
    return res


def _expected_delta(state, t):
    """``E[f_drd after t] - f_drd now`` using the closed-form objective."""
    theta = state.instance.bias[t]
    base = obj.f_drd(state)
    total = 0.0
    for x, px in ((1, theta), (0, 1.0 - theta)):
        child = state.copy()
        child.observe(t, x)
        total += px * (obj.f_drd(child) - base)
    return total


def _expected_delta_fec(state, r, t):
    theta = state.instance.bias[t]
    base = obj.f_ec(state, r)
    total = 0.0
    for x, px in ((1, theta), (0, 1.0 - theta)):
        child = state.copy()
        child.observe(t, x)
        total += px * (obj.f_ec(child, r) - base)
    return total


def suite_submodularity(num_samples=10 ** 4, max_tests=12, max_regions=4, seed=0):
    """Strong adaptive monotonicity and adaptive submodularity of f_drd and f_ec.

    For nested observations ``x_A`` (a prefix) and ``x_B`` (a longer prefix)
    of one trajectory and a test ``t`` unobserved in ``x_B``, checks
    ``E[delta(t) | x_A] >= E[delta(t) | x_B]`` and that observing ``t`` can
    never decrease the objective. Every fourth sample uses a single region,
    which checks f_ec on its own.
    """
    res = SuiteResult("submodularity")
    mono = 0
    rng = make_rng(seed, "suite-submodularity")
    for i in range(num_samples):
        single = i % 4 == 0
        inst = random_instance(rng, max_tests, 1 if single else max_regions, min_tests=2)
        truth, order = random_trajectory(inst, rng)
        n = inst.num_tests
        kb = int(rng.integers(0, n))
        ka = int(rng.integers(0, kb + 1))
        t = int(order[int(rng.integers(kb, n))])
        sa = bl.BeliefState(inst)
        for s in order[:ka]:
            sa.observe(s, truth[s])
        sb = sa.copy()
        for s in order[ka:kb]:
            sb.observe(s, truth[s])
        if single:
            da, db = _expected_delta_fec(sa, 0, t), _expected_delta_fec(sb, 0, t)
        else:
            da, db = _expected_delta(sa, t), _expected_delta(sb, t)
        res.record(da - db, TOL)
        for st in (sa, sb):
            base = obj.f_drd(st)
            for x in (0, 1):
                child = st.copy()
                child.observe(t, x)
                res.record(obj.f_drd(child) - base, TOL)
                mono += 1
    res.notes["monotonicity_checks"] = mono
    return res


def suite_argmax(num_states=1000, max_tests=12, max_regions=4, seed=0):
    """BISECT's selection against the argmax of the enumerated expected gain per cost.

    A selection counts as correct when its enumerated gain per cost is within
    a relative ``1e-9`` of the best candidate's (exact ties are genuine ties).
    """
    res = SuiteResult("argmax")
    exact = 0
    rng = make_rng(seed, "suite-argmax")
    for _ in range(num_states):
        inst = random_instance(rng, max_tests, max_regions, min_tests=2, unit_cost=False)
        table = oracle.enumerate_hypotheses(inst)
        state = random_state(inst, rng, nonterminal=True)
        if state.validated().size or np.all(state.killed):
            continue
        cand = candidate_set(state, "unconstrained")
        chosen = select_bisect(state, cand)
        scores = np.array([oracle.enum_expected_delta(inst, state.outcomes, t, table) / inst.cost[t]
                           for t in cand])
        best = scores.max()
        picked = scores[np.flatnonzero(cand == chosen)[0]]
        res.record((picked - best) / max(abs(best), 1e-300), TOL)
        exact += int(cand[int(np.argmax(scores))] == chosen)
    res.notes["exact_identity"] = exact
    return res


def bisect_bound(instance):
    return 2.0 * instance.num_regions * math.log(1.0 / oracle.min_hypothesis_prob(instance)) + 1.0


def suite_near_optimality(num_instances=200, max_tests=8, max_regions=4, seed=0):
    """Exact expected cost of unconstrained BISECT within the greedy bound of the DP optimum."""
    res = SuiteResult("near_optimality")
    rng = make_rng(seed, "suite-near-optimality")
    policy = Policy("bisect", "unconstrained")
    worst_ratio = 0.0
    for _ in range(num_instances):
        inst = random_instance(rng, max_tests, max_regions)
        greedy = oracle.policy_expected_cost(inst, policy.select)
        best = oracle.optimal_policy_cost(inst)
        ratio = greedy / best
        worst_ratio = max(worst_ratio, float(ratio))
        res.record(bisect_bound(inst) - ratio, TOL)
        res.record(ratio - 1.0, TOL)  # nothing beats the optimum
    res.notes["worst_ratio"] = worst_ratio
    return res


def alpha_bound(p_min, max_size):
    worst = max((1.0 - p_min) ** 2, p_min ** (2.0 / max_size))
    return math.inf if worst >= 1.0 else 1.0 / (1.0 - worst)


def suite_alpha_bound(num_instances=200, max_tests=12, max_regions=4, seed=0):
    """Per-step gain ratio of unconstrained vs MaxProbReg BISECT against the alpha bound.

    ``p_min`` is the smallest current region posterior and ``l`` the largest
    region size. ``notes["live_only"]`` counts violations when ``p_min`` is
    taken over live regions only, a stricter reading.
    """
    res = SuiteResult("alpha_bound")
    rng = make_rng(seed, "suite-alpha")
    policy = Policy("bisect", "maxprob")
    live_violations = 0
    worst_ratio = 0.0
    for _ in range(num_instances):
        inst = random_instance(rng, max_tests, max_regions)
        truth, _ = random_trajectory(inst, rng)
        state = bl.BeliefState(inst)
        l = int(inst.region_sizes.max())
        while state.validated().size == 0 and not np.all(state.killed):
            t = policy.select(state)
            cand = candidate_set(state, "unconstrained")
            gains = obj.normalized_gains(state, cand)
            chosen = gains[np.flatnonzero(cand == t)[0]]
            best = gains.max()
            ratio = math.inf if chosen <= 0.0 else best / chosen
            worst_ratio = max(worst_ratio, float(ratio))
            post = state.posteriors()
            bound = alpha_bound(float(post.min()), l)
            res.record(0.0 if bound == math.inf else (bound - ratio) / bound, TOL)
            live_bound = alpha_bound(float(post[post > 0].min()), l)
            if ratio > live_bound * (1 + TOL):
                live_violations += 1
            state.observe(t, truth[t])
    res.notes["worst_ratio"] = worst_ratio
    res.notes["live_only_violations"] = live_violations
    return res


def suite_set_cover(num_instances=100, max_tests=8, max_regions=4, seed=0):
    """Check-all cost of SetCover within ``ln(n) + 1`` of the DP optimum."""
    res = SuiteResult("set_cover")
    rng = make_rng(seed, "suite-set-cover")
    policy = Policy("setcover", "unconstrained")
    worst_ratio = 0.0
    for _ in range(num_instances):
        inst = random_instance(rng, max_tests, max_regions)
        greedy = oracle.policy_expected_cost(inst, policy.select, mode="check_all")
        best = oracle.optimal_policy_cost(inst, mode="check_all")
        ratio = greedy / best
        worst_ratio = max(worst_ratio, float(ratio))
        res.record(math.log(inst.num_tests) + 1.0 - ratio, TOL)
    res.notes["worst_ratio"] = worst_ratio
    return res


def suite_region_greedy(num_instances=200, max_tests=10, max_regions=5, seed=0):
    """Region-at-a-time greedy order within 4x of the best region order (disjoint regions)."""
    res = SuiteResult("region_greedy")
    rng = make_rng(seed, "suite-region-greedy")
    worst_ratio = 0.0
    for _ in range(num_instances):
        inst = random_instance(rng, max_tests, max_regions, disjoint=True)
        greedy = oracle.region_sequence_cost(inst, oracle.greedy_region_sequence(inst))
        best = oracle.optimal_region_sequence_cost(inst)
        ratio = greedy / best
        worst_ratio = max(worst_ratio, float(ratio))
        res.record(4.0 - ratio, TOL)
    res.notes["worst_ratio"] = worst_ratio
    return res


def suite_runs(num_instances=500, max_tests=12, max_regions=4, seed=0):
    """Verdict soundness and f_drd trajectory shape over random runs of every policy."""
    from .policies import ALL_POLICIES

    res = SuiteResult("runs")
    rng = make_rng(seed, "suite-runs")
    for i in range(num_instances):
        inst = random_instance(rng, max_tests, max_regions)
        truth = (rng.random(inst.num_tests) < inst.bias).astype(np.int8)
        pol = ALL_POLICIES[i % len(ALL_POLICIES)]
        out = run(inst, pol, truth, rng=make_rng(seed, "suite-runs-policy", i), record_fdrd=True)
        tested = dict(out.trace)
        ok = len(tested) == len(out.trace)
        ok &= math.isclose(out.total_cost, sum(inst.cost[t] for t in tested), rel_tol=1e-12)
        ok &= all(truth[t] == x for t, x in tested.items())
        if out.verdict == "valid":
            ok &= all(tested.get(int(t)) == 1 for t in inst.regions[out.region])
            ok &= out.fdrd_trajectory[-1] == 1.0
        else:
            ok &= all(any(tested.get(int(t)) == 0 for t in reg) for reg in inst.regions)
            ok &= all(v < 1.0 for v in out.fdrd_trajectory)
        traj = out.fdrd_trajectory
        ok &= all(b >= a - TOL for a, b in zip(traj, traj[1:]))
        res.record(0.0 if ok else -1.0)
    return res


SUITES = {
    "equivalence": suite_equivalence,
    "submodularity": suite_submodularity,
    "argmax": suite_argmax,
    "near_optimality": suite_near_optimality,
    "alpha_bound": suite_alpha_bound,
    "set_cover": suite_set_cover,
    "region_greedy": suite_region_greedy,
    "runs": suite_runs,
}

DEFAULT_SAMPLES = {
    "equivalence": 1000,
    "submodularity": 10 ** 4,
    "argmax": 1000,
    "near_optimality": 200,
    "alpha_bound": 200,
    "set_cover": 100,
    "region_greedy": 200,
    "runs": 500,
}


def run_suites(names=None, samples=None, seed=0, size_cap=None):
    """Run the named suites (all by default).

    ``samples`` overrides the sample count of every selected suite;
    ``size_cap`` lowers each suite's maximum number of tests.
    """
    names = list(names or SUITES)
    out = []
    for name in names:
        fn = SUITES[name]
        kwargs = {"seed": seed}
        n = samples or DEFAULT_SAMPLES[name]
        first = fn.__code__.co_varnames[0]
        kwargs[first] = n
        if size_cap is not None:
            default_cap = fn.__defaults__[1]
            kwargs["max_tests"] = min(size_cap, default_cap)
        out.append(fn(**kwargs))
    return out
