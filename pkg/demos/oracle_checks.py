"""Compare the fast closed forms and greedy policies with exhaustive oracles.

Everything here is exponential in the number of tests, so instances are
tiny. The same checks run at scale through ``bernoulli-drd verify``.
"""

import numpy as np

from bernoulli_drd import belief as bl
from bernoulli_drd import objective as obj
from bernoulli_drd import oracle, verify
from bernoulli_drd.model import validate_instance
from bernoulli_drd.policies import ALL_POLICIES, Policy

inst = validate_instance(6, [0.7, 0.4, 0.9, 0.5, 0.8, 0.6], [[0, 1], [1, 2, 3], [4], [3, 5]])
state = bl.belief_from_outcomes(inst, {1: 1, 4: 0})
x = state.outcomes

print("region  closed-form weight  enumerated weight  f_ec")
for r in range(inst.num_regions):
    print(f"{r:6d}  {obj.wec_pruned(state, r):18.12f}  {oracle.naive_wec(inst, r, x):17.12f}  "
          f"{obj.f_ec(state, r):.6f}")
print(f"f_drd {obj.f_drd(state):.12f} vs enumeration {oracle.enum_f_drd(inst, x):.12f}")

best = oracle.optimal_policy_cost(inst)
print(f"\noptimal expected cost {best:.4f}; bound for greedy {verify.bisect_bound(inst):.1f}x")
for pol in ALL_POLICIES:
    if pol.deterministic:
        cost = oracle.policy_expected_cost(inst, pol.select)
        print(f"  {pol.name:24s} {cost:.4f}  ratio {cost / best:.3f}")

sc = Policy("setcover", "unconstrained")
check_all = oracle.optimal_policy_cost(inst, mode="check_all")
print(f"\ncheck-all: optimal {check_all:.4f}, setcover "
      f"{oracle.policy_expected_cost(inst, sc.select, mode='check_all'):.4f}, "
      f"bound factor {np.log(inst.num_tests) + 1:.3f}")

print()
for res in verify.run_suites(samples=50, seed=0):
    print(res.line())
