"""Random geometric graphs and shortest-path region libraries over them."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from ..model import validate_instance
from ..seeding import make_rng


class DisconnectedStartGoal(RuntimeError):
    pass


class AttemptCapExceeded(RuntimeError):
    pass


@dataclass(eq=False)
class Graph2D:
    """Undirected graph embedded in the unit square.

    Edges are stored once with ``u < v``, sorted lexicographically; an edge's
    row index is its test id in every instance built on the graph.
    """

    points: np.ndarray
    edges: np.ndarray
    start: int
    goal: int

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 2)
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if self.start == self.goal:
            raise ValueError("start and goal must differ")
        if np.any(self.edges[:, 0] == self.edges[:, 1]):
            raise ValueError("self-loops are not allowed")
        canon = np.sort(self.edges, axis=1)
        if np.unique(canon, axis=0).shape[0] != canon.shape[0]:
            raise ValueError("duplicate edges")

    @property
    def num_vertices(self):
        return self.points.shape[0]

    @property
    def num_edges(self):
        return self.edges.shape[0]

    @property
    def lengths(self):
        d = self.points[self.edges[:, 0]] - self.points[self.edges[:, 1]]
        return np.hypot(d[:, 0], d[:, 1])

    def edge_index(self):
        return {(int(u), int(v)): e for e, (u, v) in enumerate(self.edges)}

    def to_dict(self):
        return {
            "vertices": [[float(x), float(y)] for x, y in self.points],
            "edges": [[int(u), int(v)] for u, v in self.edges],
            "start": int(self.start),
            "goal": int(self.goal),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["vertices"]), np.array(d["edges"]), int(d["start"]), int(d["goal"]))


def default_radius(num_vertices):
    """Twice the connectivity threshold ``sqrt(ln n / (pi n))``."""
    n = max(num_vertices, 2)
    return 2.0 * math.sqrt(math.log(n) / (math.pi * n))


def shortest_path(graph, edge_mask=None):
    """Edge ids of the shortest start-goal path using only edges in ``edge_mask``.

    Returns ``None`` when start and goal are disconnected. Edge lengths are
    continuous, so exact ties between distinct paths do not arise in
    practice; Dijkstra's predecessor choice is deterministic regardless.
    """
    mask = np.ones(graph.num_edges, dtype=bool) if edge_mask is None else np.asarray(edge_mask, bool)
    e = np.flatnonzero(mask)
    u, v = graph.edges[e, 0], graph.edges[e, 1]
    w = graph.lengths[e]
    n = graph.num_vertices
    adj = csr_matrix((np.concatenate([w, w]), (np.concatenate([u, v]), np.concatenate([v, u]))),
                     shape=(n, n))
    dist, pred = dijkstra(adj, directed=True, indices=graph.start, return_predecessors=True)
    if not np.isfinite(dist[graph.goal]):
        return None
    lookup = graph.edge_index()
    path = []
    node = graph.goal
    while node != graph.start:
        prev = int(pred[node])
        path.append(lookup[(min(prev, node), max(prev, node))])
        node = prev
    return sorted(path)


def gen_rgg(num_vertices, radius=None, seed=0, points=None):
    """Random geometric graph on the unit square.

    Vertices are uniform in ``[0, 1]^2`` (or given by ``points``); an edge
    joins every pair within ``radius``. Start and goal are the vertices
    nearest ``(0, 0)`` and ``(1, 1)``.

    Raises
    ------
    DisconnectedStartGoal
        If no path joins start and goal.
    """
    if num_vertices < 2:
        raise ValueError("need at least two vertices")
    if radius is None:
        radius = default_radius(num_vertices)
    if points is None:
        points = make_rng(seed, "rgg").random((num_vertices, 2))
    points = np.asarray(points, dtype=float)
    pairs = cKDTree(points).query_pairs(r=radius, output_type="ndarray")
    pairs = np.sort(pairs.reshape(-1, 2), axis=1)
    if pairs.size:
        pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    start = int(np.argmin(np.hypot(points[:, 0], points[:, 1])))
    goal = int(np.argmin(np.hypot(points[:, 0] - 1.0, points[:, 1] - 1.0)))
    if start == goal:
        raise DisconnectedStartGoal("start and goal coincide")
    graph = Graph2D(points, pairs, start, goal)
    if shortest_path(graph) is None:
        raise DisconnectedStartGoal(f"start {start} and goal {goal} are not connected")
    return graph


def gen_gbg_paths(graph, num_regions=100, seed=0, max_attempts=10 ** 4,
                  bias_range=(0.1, 0.9)):
    """Library of distinct shortest paths on randomly thinned copies of ``graph``.

    Each attempt deletes every edge with probability 0.5 and keeps the
    shortest surviving start-goal path if it is new. Tests are all graph
    edges, with biases drawn from ``U[bias_range]``.
    """
    rng = make_rng(seed, "gbg")
    paths = []
    seen = set()
    attempts = 0
    while len(paths) < num_regions:
        if attempts >= max_attempts:
            raise AttemptCapExceeded(
                f"found {len(paths)} distinct paths in {max_attempts} attempts"
            )
        attempts += 1
        keep = rng.random(graph.num_edges) >= 0.5
        path = shortest_path(graph, keep)
        if path is None or tuple(path) in seen:
            continue
        seen.add(tuple(path))
        paths.append(path)
    theta = make_rng(seed, "gbg-bias").uniform(bias_range[0], bias_range[1], graph.num_edges)
    meta = {"generator": "gbg", "num_regions": num_regions, "seed": seed, "attempts": attempts}
    return validate_instance(graph.num_edges, theta, paths, meta=meta)


def gbg_bundle(num_vertices=200, num_regions=100, num_problems=100, seed=0,
               conditioning="at_least_one_valid", radius=None, bias_range=(0.1, 0.9)):
    """RGG path library with uniform edge biases and prior-sampled ground truths."""
    from ..runner import sample_truths
    from .bundle import DatasetBundle

    graph = gen_rgg(num_vertices, radius=radius, seed=seed)
    inst = gen_gbg_paths(graph, num_regions, seed=seed, bias_range=tuple(bias_range))
    truths = sample_truths(inst, num_problems, seed, conditioning, label="gbg-truth")
    prov = {
        "generator": "gbg",
        "params": {"num_vertices": num_vertices, "num_regions": num_regions,
                   "num_problems": num_problems, "conditioning": conditioning,
                   "radius": radius, "bias_range": list(bias_range)},
        "seed": seed,
        "graph": graph.to_dict(),
    }
    return DatasetBundle(inst, truths, prov)
