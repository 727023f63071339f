"""Command-line entry point: ``generate``, ``run``, ``bench`` and ``verify``.

Exit codes are 0 on success, 1 on runtime errors and 2 on usage or
configuration errors. The fully resolved configuration of every command is
logged to stderr as JSON.
"""

import argparse
import json
import logging
import os
import sys

from . import bench as bn
from .datasets import (InvalidParams, disparity_bundle, dumps_bundle, gbg_bundle, gen_synthetic,
                       load_bundle, planning_bundle)
from .datasets.worlds import KINDS as WORLD_KINDS
from .model import InstanceError
from .policies import ALL_POLICIES, PolicyError, parse_policy
from .runner import run
from .seeding import make_rng

log = logging.getLogger("bernoulli_drd")


class ConfigError(ValueError):
    pass


GENERATORS = {
    "synthetic": (gen_synthetic, {"num_tests": 100, "num_regions": 100, "num_problems": 100,
                                  "conditioning": "at_least_one_valid"}),
    "disparity": (disparity_bundle, {"num_problems": 1000, "conditioning": "at_least_one_valid",
                                     "T": 10, "theta_a": 0.9, "epsilon": 0.01}),
    "gbg": (gbg_bundle, {"num_vertices": 200, "num_regions": 100, "num_problems": 100,
                         "conditioning": "at_least_one_valid", "radius": None,
                         "bias_range": [0.1, 0.9]}),
}
PLANNING_DEFAULTS = {"num_vertices": 200, "library_size": 100, "num_train": 1000,
                     "num_bias_worlds": 1000, "num_problems": 100,
                     "conditioning": "at_least_one_valid", "radius": None, "world_params": None}
KINDS = tuple(GENERATORS) + WORLD_KINDS

# command-line flag -> config key, per generator family
FLAG_KEYS = {
    "tests": "num_tests",
    "regions": "num_regions",
    "problems": "num_problems",
    "vertices": "num_vertices",
    "conditioning": "conditioning",
}
CONDITIONINGS = ("all", "at_least_one_valid")


def _defaults(kind):
    return dict(PLANNING_DEFAULTS) if kind in WORLD_KINDS else dict(GENERATORS[kind][1])


def resolve_generate_config(kind, config=None, overrides=None):
    """Merge defaults, a config mapping and flag overrides; unknown keys are rejected.

    For the 2D world kinds ``regions`` maps onto ``library_size``.
    """
    resolved = _defaults(kind)
    for source in (config or {}, overrides or {}):
        for key, value in source.items():
            if kind in WORLD_KINDS and key == "num_regions":
                key = "library_size"
            if key not in resolved:
                raise ConfigError(f"unknown {kind} config key {key!r}; expected one of "
                                  f"{sorted(resolved)}")
            resolved[key] = value
    if resolved.get("conditioning") not in CONDITIONINGS:
        raise ConfigError(f"conditioning must be one of {CONDITIONINGS}")
    return resolved


def generate(kind, seed, config=None, overrides=None):
    """Build the dataset bundle for ``kind`` with the resolved config."""
    if kind not in KINDS:
        raise ConfigError(f"unknown kind {kind!r}; expected one of {KINDS}")
    params = resolve_generate_config(kind, config, overrides)
    log.info("config %s", json.dumps({"command": "generate", "kind": kind, "seed": seed,
                                      **params}, sort_keys=True))
    if kind in WORLD_KINDS:
        return planning_bundle(kind=kind, seed=seed, **params)
    return GENERATORS[kind][0](seed=seed, **params)


def _read_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_generate(args):
    overrides = {FLAG_KEYS[k]: v for k, v in vars(args).items() if k in FLAG_KEYS and v is not None}
    bundle = generate(args.kind, args.seed, _read_config(args.config), overrides)
    _write(dumps_bundle(bundle), args.out)
    return 0


def cmd_run(args):
    policy = parse_policy(args.policy)
    bundle = load_bundle(args.bundle)
    if not 0 <= args.problem < bundle.num_problems:
        raise ConfigError(f"problem index {args.problem} outside [0, {bundle.num_problems})")
    log.info("config %s", json.dumps({"command": "run", "bundle": args.bundle, "policy": policy.name,
                                      "problem": args.problem, "seed": args.seed,
                                      "trace": args.trace}, sort_keys=True))
    rng = make_rng(args.seed, policy.name, args.problem)
    result = run(bundle.instance, policy, bundle.ground_truths[args.problem], rng=rng,
                 record_fdrd=args.trace)
    _write(json.dumps(result.to_dict(), indent=1, sort_keys=True) + "\n", args.out)
    return 0


def _policy_list(text):
    if text is None:
        return list(ALL_POLICIES)
    return [parse_policy(p) for p in text.split(",") if p.strip()]


def cmd_bench(args):
    if args.format not in ("csv", "json", "markdown"):
        raise ConfigError(f"unknown report format {args.format!r}")
    policies = _policy_list(args.policies)
    baseline = parse_policy(args.baseline)
    if baseline.name not in [p.name for p in policies]:
        policies.append(baseline)
    threads = args.threads or os.cpu_count() or 1
    log.info("config %s", json.dumps({
        "command": "bench", "bundle": args.bundle, "policies": [p.name for p in policies],
        "baseline": baseline.name, "seed": args.seed, "threads": threads,
        "format": args.format, "normalization": args.normalization,
        "resamples": args.resamples, "timings": args.timings}, sort_keys=True))
    bundle = load_bundle(args.bundle)
    report = bn.run_bench(bundle, policies, baseline, args.seed, threads=threads,
                          normalization=args.normalization, num_resamples=args.resamples,
                          timings=args.timings, dataset=args.dataset)
    _write(bn.emit_report(report, args.format), args.out)
    if args.plot_data:
        _write(bn.plot_data(report), args.plot_data)
    return 0


def cmd_verify(args):
    from . import verify

    names = args.suite or list(verify.SUITES)
    for name in names:
        if name not in verify.SUITES:
            raise ConfigError(f"unknown suite {name!r}; expected one of {sorted(verify.SUITES)}")
    log.info("config %s", json.dumps({"command": "verify", "suites": names, "samples": args.samples,
                                      "size_cap": args.size_cap, "seed": args.seed},
                                     sort_keys=True))
    results = verify.run_suites(names, args.samples, args.seed, args.size_cap)
    for res in results:
        extra = " ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}"
                         for k, v in res.notes.items())
        print(res.line() + (f" ({extra})" if extra else ""))
    return 0 if all(r.passed for r in results) else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="bernoulli-drd", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a dataset bundle")
    g.add_argument("--kind", required=True, choices=KINDS)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--config", help="JSON file of generator parameters")
    g.add_argument("--tests", type=int)
    g.add_argument("--regions", type=int, help="regions, or library size for 2D worlds")
    g.add_argument("--problems", type=int)
    g.add_argument("--vertices", type=int)
    g.add_argument("--conditioning", choices=CONDITIONINGS)
    g.add_argument("--out", "-o", help="output file (default stdout)")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run one policy on one problem of a bundle")
    r.add_argument("bundle")
    r.add_argument("--policy", default="bisect:unconstrained")
    r.add_argument("--problem", type=int, default=0)
    r.add_argument("--seed", type=int, default=0, help="seed for randomized policies")
    r.add_argument("--trace", action="store_true", help="include the f_drd trajectory")
    r.add_argument("--out", "-o")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="benchmark policies on a bundle")
    b.add_argument("bundle")
    b.add_argument("--seed", type=int, required=True)
    b.add_argument("--policies", help="comma-separated rule:selector list (default all)")
    b.add_argument("--baseline", default="bisect:maxprob")
    b.add_argument("--format", default="csv")
    b.add_argument("--normalization", default="ratio_of_means", choices=bn.NORMALIZATIONS)
    b.add_argument("--resamples", type=int, default=bn.NUM_BOOTSTRAP)
    b.add_argument("--threads", type=int, help="worker threads (default: available CPUs)")
    b.add_argument("--timings", action="store_true", help="record wall-clock time per policy")
    b.add_argument("--dataset", help="dataset label in the report")
    b.add_argument("--plot-data", help="write long-format per-problem costs here")
    b.add_argument("--out", "-o")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="run the oracle property suites")
    v.add_argument("--suite", action="append", help="suite name (repeatable; default all)")
    v.add_argument("--samples", type=int, help="override the sample count of each suite")
    v.add_argument("--size-cap", type=int, help="maximum number of tests per random instance")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (ConfigError, PolicyError, InvalidParams, InstanceError, bn.UnknownFormat) as exc:
        log.error("%s", exc)
        return 2
    except Exception as exc:  # noqa: BLE001 - surfaced as a runtime failure
        log.error("%s: %s", type(exc).__name__, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
