"""2D planning datasets: path libraries learned from sampled occupancy maps.

Edge priors are independent per edge, but the benchmark ground truths come
from whole sampled maps, so true edge outcomes are correlated. That mismatch
is intentional.
"""

import numpy as np

from ..model import validate_instance
from ..runner import REJECTION_CAP, RejectionCapExceeded, any_region_valid
from .bundle import DatasetBundle
from .graphs import gen_rgg, shortest_path
from .worlds import bias_from_outcomes, resolve_params, sample_edge_outcomes


class EmptyLibrary(RuntimeError):
    pass


def candidate_paths(graph, training_outcomes):
    """Distinct shortest valid paths, one per training world that has one.

    Returns ``(paths, first_seen)`` in order of first appearance.
    """
    paths = []
    index = {}
    for i, row in enumerate(np.atleast_2d(training_outcomes)):
        path = shortest_path(graph, row.astype(bool))
        if path is None:
            continue
        key = tuple(path)
        if key not in index:
            index[key] = len(paths)
            paths.append(path)
    return paths


def greedy_library(paths, training_outcomes, budget):
    """Greedy maximum coverage over training worlds.

    Repeatedly adds the path valid on the most not-yet-covered worlds; ties
    (including zero new coverage once every world is covered) go to the path
    valid on most worlds overall, then to the earliest found. Stops at
    ``budget`` paths or when candidates run out.
    """
    outcomes = np.atleast_2d(training_outcomes).astype(bool)
    valid = np.array([np.all(outcomes[:, p], axis=1) for p in paths]).reshape(len(paths), -1)
    total = valid.sum(axis=1)
    covered = np.zeros(outcomes.shape[0], dtype=bool)
    remaining = list(range(len(paths)))
    chosen = []
    while remaining and len(chosen) < budget:
        new = valid[remaining][:, ~covered].sum(axis=1)
        best = max(range(len(remaining)),
                   key=lambda k: (new[k], total[remaining[k]], -remaining[k]))
        pick = remaining.pop(best)
        chosen.append(pick)
        covered |= valid[pick]
    return [paths[i] for i in chosen]


def build_path_library(graph, training_outcomes, budget, bias_outcomes):
    """Problem instance whose regions are a greedily chosen path library.

    Parameters
    ----------
    graph : Graph2D
    training_outcomes : ndarray, shape (worlds, edges)
        Edge validity in each training world.
    budget : int
        Maximum number of paths.
    bias_outcomes : ndarray, shape (worlds, edges)
        Held-out edge validity used to estimate the per-edge biases.

    Returns
    -------
    ProblemInstance
        Tests are the graph edges used by some library path, in increasing
        edge id; ``meta["edge_ids"]`` maps test ids back to graph edges.
    """
    paths = candidate_paths(graph, training_outcomes)
    if not paths:
        raise EmptyLibrary("no training world has a valid start-goal path")
    library = greedy_library(paths, training_outcomes, budget)
    edge_ids = np.unique(np.concatenate(library))
    remap = {int(e): i for i, e in enumerate(edge_ids)}
    regions = [[remap[int(e)] for e in p] for p in library]
    theta = bias_from_outcomes(np.atleast_2d(bias_outcomes)[:, edge_ids])
    meta = {"generator": "path_library", "edge_ids": [int(e) for e in edge_ids]}
    return validate_instance(edge_ids.size, theta, regions, meta=meta)


def planning_bundle(kind="one_wall", num_vertices=200, library_size=100, num_train=1000,
                    num_bias_worlds=1000, num_problems=100, seed=0, world_params=None,
                    radius=None, conditioning="at_least_one_valid"):
    """End-to-end 2D planning dataset.

    Samples an RGG, learns a path library on ``num_train`` worlds, estimates
    edge biases on ``num_bias_worlds`` further worlds and draws benchmark
    ground truths from fresh worlds (rejecting worlds where no library path is
    valid, under ``at_least_one_valid``).
    """
    params = resolve_params(kind, world_params)
    graph = gen_rgg(num_vertices, radius=radius, seed=seed)
    train = sample_edge_outcomes(graph, kind, num_train, seed, "train-world", params)
    held = sample_edge_outcomes(graph, kind, num_bias_worlds, seed, "bias-world", params)
    inst = build_path_library(graph, train, library_size, held)
    edge_ids = np.asarray(inst.meta["edge_ids"])

    truths = []
    attempt = 0
    batch = max(num_problems, 16)
    while len(truths) < num_problems:
        if attempt >= REJECTION_CAP:
            raise RejectionCapExceeded(attempt, len(truths))
        rows = sample_edge_outcomes(graph, kind, batch, seed, f"problem-world-{attempt}", params)
        attempt += batch
        rows = rows[:, edge_ids]
        if conditioning == "at_least_one_valid":
            rows = rows[any_region_valid(inst, rows)]
        truths.extend(rows[: num_problems - len(truths)])
    prov = {
        "generator": "planning",
        "params": {"kind": kind, "num_vertices": num_vertices, "library_size": library_size,
                   "num_train": num_train, "num_bias_worlds": num_bias_worlds,
                   "num_problems": num_problems, "conditioning": conditioning,
                   "radius": radius, "world": params},
        "seed": seed,
        "graph": graph.to_dict(),
    }
    return DatasetBundle(inst, np.array(truths, dtype=np.int8), prov)
