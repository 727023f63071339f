"""A likely but long path versus a slightly less likely single edge.

Region 0 is one edge with bias 0.9; region 1 is ten edges whose product is
0.91. Latching onto the most probable region pays for many evaluations,
while unconstrained BISECT tries the single edge first.
"""

from bernoulli_drd import bench as bn
from bernoulli_drd import oracle
from bernoulli_drd.belief import init_belief
from bernoulli_drd.datasets import disparity_bundle, gen_disparity
from bernoulli_drd.policies import Policy, candidate_set, select_bisect
from bernoulli_drd.runner import expected_cost

inst = gen_disparity(T=10, theta_a=0.9, epsilon=0.01)
theta_b = inst.bias[1]
print(f"theta_b = {theta_b:.5f}; priors {inst.region_priors}")

state = init_belief(inst)
print("unconstrained BISECT evaluates test", select_bisect(state, candidate_set(state, "unconstrained")))

unc = Policy("bisect", "unconstrained")
mp = Policy("bisect", "maxprob")
for pol in (unc, mp):
    exact = oracle.policy_expected_cost(inst, pol.select)
    mean, se = expected_cost(inst, pol, "all", 10 ** 4, master_seed=1)
    print(f"{pol.name:22s} exact {exact:.4f}  Monte Carlo {mean:.4f} +- {se:.4f}")

# Evaluating every b test regardless of failures would cost (T + 1) - theta_b**T.
print("all-b-tests cost:", round(11 - theta_b ** 10, 4),
      "; stopping at the first failed b:", round((1 - theta_b ** 10) / (1 - theta_b) + 1 - theta_b ** 10, 4))

bundle = disparity_bundle(num_problems=2000, seed=1)
rep = bn.run_bench(bundle, [unc, mp], unc, master_seed=1)
print()
print(bn.emit_report(rep, "markdown"))
