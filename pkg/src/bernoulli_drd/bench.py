"""Paired Monte Carlo benchmark of policies over a dataset bundle.

Every policy runs on the same ground truths. Normalized cost compares a
policy to the baseline as ``(c(policy) - c(baseline)) / c(baseline)``, where
``c`` is the expected cost over problems (``"ratio_of_means"``, default) or,
optionally, the mean of the per-problem ratios (``"per_problem"``). Both use
a percentile bootstrap over problem indices, shared by all policies.
"""

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .policies import parse_policy
from .runner import run
from .seeding import make_rng

NUM_BOOTSTRAP = 10 ** 4
CSV_COLUMNS = ["dataset", "policy", "selector", "mean_cost", "norm_lo", "norm_hi", "trials", "seed"]
NORMALIZATIONS = ("ratio_of_means", "per_problem")


class UnknownFormat(ValueError):
    pass


@dataclass
class PolicyStats:
    mean_cost: float
    norm_mean: float
    norm_lo: float
    norm_hi: float
    num_trials: int
    runtime: float = None


@dataclass
class BenchReport:
    """Per-policy cost statistics against a baseline policy.

    ``costs`` keeps the per-problem costs (policy name -> list) so the report
    can be re-analysed; ``runtime`` values are only filled when timings were
    requested, which keeps reports reproducible byte for byte otherwise.
    """

    per_policy: dict
    baseline: str
    dataset: str
    seed: int
    normalization: str = "ratio_of_means"
    provenance: dict = field(default_factory=dict)
    costs: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "baseline": self.baseline,
            "dataset": self.dataset,
            "seed": self.seed,
            "normalization": self.normalization,
            "provenance": self.provenance,
            "per_policy": {
                name: {k: v for k, v in vars(s).items() if not (k == "runtime" and v is None)}
                for name, s in self.per_policy.items()
            },
            "costs": {k: [float(c) for c in v] for k, v in self.costs.items()},
        }

    @classmethod
    def from_dict(cls, d):
        per = {name: PolicyStats(**s) for name, s in d["per_policy"].items()}
        return cls(per, d["baseline"], d["dataset"], d["seed"], d.get("normalization", "ratio_of_means"),
                   d.get("provenance", {}), {k: list(v) for k, v in d.get("costs", {}).items()})


def normalized_cost(costs, base, normalization="ratio_of_means"):
    costs = np.asarray(costs, dtype=float)
    base = np.asarray(base, dtype=float)
    if normalization == "ratio_of_means":
        b = base.mean(axis=-1)
        return (costs.mean(axis=-1) - b) / b
    if normalization == "per_problem":
        return ((costs - base) / base).mean(axis=-1)
    raise ValueError(f"unknown normalization {normalization!r}")


CHUNK_CELLS = 2 ** 22


def bootstrap_chunks(num_problems, master_seed, num_resamples=NUM_BOOTSTRAP):
    """Resampled problem indices, yielded in fixed-size row blocks.

    Every call replays the same ``(master_seed, "bootstrap")`` stream, so all
    policies share identical resamples; the block size depends only on
    ``num_problems``.
    """
    rng = make_rng(master_seed, "bootstrap")
    rows = max(1, CHUNK_CELLS // max(num_problems, 1))
    done = 0
    while done < num_resamples:
        k = min(rows, num_resamples - done)
        yield rng.integers(0, num_problems, size=(k, num_problems))
        done += k


def bootstrap_indices(num_problems, master_seed, num_resamples=NUM_BOOTSTRAP):
    return np.concatenate(list(bootstrap_chunks(num_problems, master_seed, num_resamples)))


def _percentiles(stats, level):
    tail = (1.0 - level) / 2.0 * 100.0
    lo, hi = np.percentile(stats, [tail, 100.0 - tail])
    return float(lo), float(hi)


def _resampled(fn, num_problems, master_seed, num_resamples):
    if isinstance(master_seed, np.ndarray):
        return fn(master_seed)
    return np.concatenate([fn(idx) for idx in
                           bootstrap_chunks(num_problems, master_seed, num_resamples)])


def bootstrap_ci(costs, base, master_seed, normalization="ratio_of_means", level=0.95,
                 num_resamples=NUM_BOOTSTRAP):
    """Percentile interval of the normalized cost over paired resamples.

    ``master_seed`` may also be an explicit index matrix.
    """
    costs = np.asarray(costs, dtype=float)
    base = np.asarray(base, dtype=float)
    if np.array_equal(costs, base):
        return 0.0, 0.0
    stats = _resampled(lambda idx: normalized_cost(costs[idx], base[idx], normalization),
                       costs.size, master_seed, num_resamples)
    return _percentiles(stats, level)


def paired_difference_ci(costs_a, costs_b, base, master_seed, normalization="ratio_of_means",
                         level=0.95, num_resamples=NUM_BOOTSTRAP):
    """Interval for ``norm(a) - norm(b)`` over the same paired resamples.

    An interval entirely above 0 means ``a`` is significantly costlier than ``b``.
    """
    a = np.asarray(costs_a, dtype=float)
    b = np.asarray(costs_b, dtype=float)
    base = np.asarray(base, dtype=float)
    if np.array_equal(a, b):
        return 0.0, 0.0
    stats = _resampled(lambda idx: normalized_cost(a[idx], base[idx], normalization)
                       - normalized_cost(b[idx], base[idx], normalization),
                       a.size, master_seed, num_resamples)
    return _percentiles(stats, level)


def run_policy_costs(bundle, policy, master_seed, threads=1, timings=False):
    """Cost of ``policy`` on each ground truth of ``bundle``.

    Problem ``i`` uses the rng stream ``(master_seed, policy name, i)``.
    """
    inst = bundle.instance

    def cell(i):
        rng = make_rng(master_seed, policy.name, i)
        return run(inst, policy, bundle.ground_truths[i], rng=rng).total_cost

    start = time.perf_counter()
    n = bundle.num_problems
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            costs = list(pool.map(cell, range(n)))
    else:
        costs = [cell(i) for i in range(n)]
    elapsed = time.perf_counter() - start
    return np.array(costs, dtype=float), (elapsed if timings else None)


def run_bench(bundle, policies, baseline, master_seed, threads=1, normalization="ratio_of_means",
              num_resamples=NUM_BOOTSTRAP, timings=False, dataset=None):
    """Benchmark ``policies`` (names or :class:`Policy`) against ``baseline``.

    Returns
    -------
    BenchReport
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    policies = [parse_policy(p) if isinstance(p, str) else p for p in policies]
    names = [p.name for p in policies]
    base_name = parse_policy(baseline).name if isinstance(baseline, str) else baseline.name
    if base_name not in names:
        raise ValueError(f"baseline {base_name} must be one of the benchmarked policies")
    if bundle.num_problems < 1:
        raise ValueError("bundle has no ground truths")

    results = {}
    for pol in policies:
        results[pol.name] = run_policy_costs(bundle, pol, master_seed, threads, timings)
    base = results[base_name][0]
    per = {}
    for name in names:
        costs, elapsed = results[name]
        lo, hi = bootstrap_ci(costs, base, master_seed, normalization,
                              num_resamples=num_resamples)
        per[name] = PolicyStats(
            mean_cost=float(costs.mean()),
            norm_mean=float(normalized_cost(costs, base, normalization)),
            norm_lo=lo,
            norm_hi=hi,
            num_trials=int(costs.size),
            runtime=elapsed,
        )
    prov = dict(bundle.provenance)
    prov.pop("graph", None)
    dataset = dataset or str(prov.get("generator", "dataset"))
    return BenchReport(per, base_name, dataset, int(master_seed), normalization, prov,
                       {k: v[0].tolist() for k, v in results.items()})


def _split(name):
    rule, _, selector = name.partition(":")
    return rule, selector


def _csv_rows(report):
    for name, s in report.per_policy.items():
        rule, selector = _split(name)
        yield [report.dataset, rule, selector, repr(s.mean_cost), repr(s.norm_lo),
               repr(s.norm_hi), s.num_trials, report.seed]


def emit_report(report, fmt="csv"):
    """Render a report as ``csv``, ``json`` or ``markdown`` text."""
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=1, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in _csv_rows(report):
            writer.writerow(row)
        return buf.getvalue()
    if fmt == "markdown":
        rules = []
        for name in report.per_policy:
            rule = _split(name)[0]
            if rule not in rules:
                rules.append(rule)
        lines = [f"Normalized cost (95% CI) w.r.t. `{report.baseline}` on {report.dataset}", "",
                 "| selector | " + " | ".join(rules) + " |",
                 "|---|" + "---|" * len(rules)]
        for selector in ("unconstrained", "maxprob"):
            cells = []
            for rule in rules:
                s = report.per_policy.get(f"{rule}:{selector}")
                cells.append("" if s is None else f"({s.norm_lo:.2f}, {s.norm_hi:.2f})")
            if any(cells):
                lines.append(f"| {selector} | " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"
    raise UnknownFormat(f"unknown report format {fmt!r}; expected csv, json or markdown")


def parse_csv_report(text):
    """Rows of a csv report as dicts with numeric fields converted."""
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        for key in ("mean_cost", "norm_lo", "norm_hi"):
            row[key] = float(row[key])
        row["trials"] = int(row["trials"])
        row["seed"] = int(row["seed"])
        rows.append(row)
    return rows


def plot_data(report):
    """Long-format csv of per-problem costs for external plotting."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["dataset", "policy", "selector", "problem", "cost"])
    for name, costs in report.costs.items():
        rule, selector = _split(name)
        for i, c in enumerate(costs):
            writer.writerow([report.dataset, rule, selector, i, repr(float(c))])
    return buf.getvalue()
