"""Benchmark every policy on a OneWall planning dataset.

Builds a random geometric graph, learns a path library from sampled
occupancy maps, and compares the policies on fresh maps. Pass a smaller
``--vertices``/``--problems`` for a quick look.
"""

import argparse
import time

from bernoulli_drd import bench as bn
from bernoulli_drd.datasets import gen_world, planning_bundle
from bernoulli_drd.policies import ALL_POLICIES

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--kind", default="one_wall", choices=["one_wall", "two_wall", "forest"])
parser.add_argument("--vertices", type=int, default=200)
parser.add_argument("--library", type=int, default=100)
parser.add_argument("--problems", type=int, default=100)
parser.add_argument("--seed", type=int, default=1)
args = parser.parse_args()

world = gen_world(args.kind, seed=args.seed).occupancy
print(f"sample {args.kind} map ({world.mean():.1%} occupied), every 5th cell:")
for row in world[::-5, ::5]:
    print("".join("#" if c else "." for c in row))

start = time.perf_counter()
bundle = planning_bundle(args.kind, num_vertices=args.vertices, library_size=args.library,
                         num_problems=args.problems, seed=args.seed)
inst = bundle.instance
print(f"\n{inst.num_tests} library edges, {inst.num_regions} paths, "
      f"mean path length {inst.region_sizes.mean():.1f}, built in {time.perf_counter() - start:.1f}s")

report = bn.run_bench(bundle, list(ALL_POLICIES), "bisect:maxprob", args.seed, dataset=args.kind)
print()
print(bn.emit_report(report, "markdown"))
for name, s in report.per_policy.items():
    print(f"{name:24s} mean cost {s.mean_cost:7.2f}")
