import math

from bernoulli_drd import objective as obj
from bernoulli_drd import verify


def test_suites_pass_on_small_samples():
    for res in verify.run_suites(samples=15, seed=3):
        assert res.passed, res.line()


def test_sign_flip_in_fec_is_detected():
    res = verify.suite_equivalence(num_instances=30, seed=1,
                                   f_ec_fn=lambda state, r: -obj.f_ec(state, r))
    assert not res.passed
    assert res.violations > 0


def test_alpha_bound_formula():
    assert verify.alpha_bound(0.0, 3) == math.inf
    assert verify.alpha_bound(0.5, 1) == 1.0 / (1.0 - 0.25)
    # with long regions the p_min^(2/l) term dominates
    assert verify.alpha_bound(0.5, 10) == 1.0 / (1.0 - 0.5 ** 0.2)


def test_random_instances_are_valid_and_seeded():
    from bernoulli_drd.seeding import make_rng

    a = verify.random_instance(make_rng(0, "x"), disjoint=True)
    b = verify.random_instance(make_rng(0, "x"), disjoint=True)
    assert [r.tolist() for r in a.regions] == [r.tolist() for r in b.regions]
    seen = [t for r in a.regions for t in r.tolist()]
    assert len(seen) == len(set(seen))


def test_suite_result_margins():
    res = verify.SuiteResult("demo")
    res.record(0.5)
    res.record(-1e-12, tol=1e-9)
    assert res.passed and res.worst_margin == -1e-12
    res.record(-1.0)
    assert not res.passed and res.violations == 1
