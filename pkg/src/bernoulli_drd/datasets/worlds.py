"""Binary occupancy maps over the unit square and edge collision checking.

``occupancy[i, j]`` covers ``x in [j/res, (j+1)/res)`` and
``y in [i/res, (i+1)/res)``; ``True`` means occupied.
"""

from dataclasses import dataclass, field

import numpy as np

from ..seeding import make_rng

WORLD_DEFAULTS = {
    "one_wall": {
        "resolution": 100,
        "wall_thickness": 3,
        "num_gaps": 2,
        "gap_width": 6,
        "wall_heights": [[0.3, 0.7]],
        "num_blocks": 10,
        "block_size": 5,
    },
    "two_wall": {
        "resolution": 100,
        "wall_thickness": 3,
        "num_gaps": 2,
        "gap_width": 6,
        "wall_heights": [[0.3, 0.45], [0.55, 0.7]],
        "num_blocks": 10,
        "block_size": 5,
    },
    "forest": {
        "resolution": 100,
        "num_clusters": 8,
        "trees_per_cluster": 12,
        "tree_size": 3,
        "spread": 0.05,
    },
}
KINDS = tuple(WORLD_DEFAULTS)


@dataclass(eq=False)
class WorldMap:
    occupancy: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.occupancy = np.asarray(self.occupancy, dtype=bool)
        if self.occupancy.ndim != 2 or min(self.occupancy.shape) < 1:
            raise ValueError("occupancy must be a non-empty 2-D grid")

    @property
    def resolution(self):
        return self.occupancy.shape[0]

    def to_dict(self):
        """Row-major bitmap as alternating run lengths, starting with a free run."""
        flat = self.occupancy.ravel().astype(np.int8)
        change = np.flatnonzero(np.diff(flat)) + 1
        bounds = np.concatenate([[0], change, [flat.size]])
        runs = np.diff(bounds).tolist()
        if flat.size and flat[0] == 1:
            runs = [0] + runs
        return {"shape": list(self.occupancy.shape), "runs": runs, "params": self.params}

    @classmethod
    def from_dict(cls, d):
        values = np.arange(len(d["runs"])) % 2
        flat = np.repeat(values, d["runs"]).astype(bool)
        return cls(flat.reshape(d["shape"]), dict(d.get("params", {})))


def resolve_params(kind, params=None):
    if kind not in WORLD_DEFAULTS:
        raise ValueError(f"unknown world kind {kind!r}; expected one of {KINDS}")
    merged = dict(WORLD_DEFAULTS[kind])
    for key, value in (params or {}).items():
        if key not in merged:
            raise ValueError(f"unknown {kind} parameter {key!r}")
        merged[key] = value
    return merged


def _fill_square(grid, row, col, size):
    res = grid.shape[0]
    grid[max(row, 0):min(row + size, res), max(col, 0):min(col + size, res)] = True


def _add_wall(grid, rng, height_range, p):
    res = grid.shape[0]
    y = rng.uniform(*height_range)
    row = min(int(y * res), res - p["wall_thickness"])
    grid[row:row + p["wall_thickness"], :] = True
    for _ in range(p["num_gaps"]):
        col = int(rng.integers(0, res - p["gap_width"] + 1))
        grid[row:row + p["wall_thickness"], col:col + p["gap_width"]] = False


def gen_world(kind="one_wall", params=None, seed=0, rng=None):
    """Sample an occupancy map.

    ``one_wall`` and ``two_wall`` draw full-width walls at uniform heights in
    each ``wall_heights`` interval, punch ``num_gaps`` gaps of ``gap_width``
    cells at uniform positions, then scatter ``num_blocks`` square blocks.
    ``forest`` places ``num_clusters`` uniform centres and scatters
    ``trees_per_cluster`` squares around each with Gaussian offsets.
    """
    p = resolve_params(kind, params)
    rng = rng if rng is not None else make_rng(seed, f"world-{kind}")
    res = int(p["resolution"])
    grid = np.zeros((res, res), dtype=bool)
    if kind == "forest":
        centres = rng.random((int(p["num_clusters"]), 2))
        for cx, cy in centres:
            offs = rng.normal(0.0, p["spread"], size=(int(p["trees_per_cluster"]), 2))
            for dx, dy in offs:
                col = int(np.floor((cx + dx) * res))
                row = int(np.floor((cy + dy) * res))
                _fill_square(grid, row, col, int(p["tree_size"]))
    else:
        for height_range in p["wall_heights"]:
            _add_wall(grid, rng, height_range, p)
        size = int(p["block_size"])
        for _ in range(int(p["num_blocks"])):
            row, col = rng.integers(0, res - size + 1, size=2)
            _fill_square(grid, int(row), int(col), size)
    return WorldMap(grid, {"kind": kind, **p})


def _segment_samples(graph, resolution):
    """Sample points along every edge at a quarter-cell spacing.

    Returns ``(points, edge_of_point)``.
    """
    a = graph.points[graph.edges[:, 0]]
    b = graph.points[graph.edges[:, 1]]
    n = np.maximum(np.ceil(graph.lengths * resolution * 4.0).astype(np.int64), 1) + 1
    edge_of = np.repeat(np.arange(graph.num_edges), n)
    starts = np.cumsum(n) - n
    frac = (np.arange(edge_of.size) - starts[edge_of]) / (n[edge_of] - 1)
    pts = a[edge_of] + frac[:, None] * (b - a)[edge_of]
    return pts, edge_of


def collide(graph, world, samples=None):
    """Edge validity under ``world``: 0 if the segment enters an occupied cell, else 1."""
    res = world.resolution
    pts, edge_of = samples if samples is not None else _segment_samples(graph, res)
    cells = np.clip(np.floor(pts * res).astype(np.int64), 0, res - 1)
    hit = world.occupancy[cells[:, 1], cells[:, 0]]
    blocked = np.zeros(graph.num_edges, dtype=bool)
    np.logical_or.at(blocked, edge_of, hit)
    return (~blocked).astype(np.int8)


def sample_edge_outcomes(graph, kind, num_worlds, seed, label, params=None):
    """Collision outcomes (``num_worlds x num_edges``) for freshly sampled worlds."""
    p = resolve_params(kind, params)
    samples = _segment_samples(graph, int(p["resolution"]))
    out = np.empty((num_worlds, graph.num_edges), dtype=np.int8)
    for i in range(num_worlds):
        world = gen_world(kind, p, rng=make_rng(seed, label, i))
        out[i] = collide(graph, world, samples)
    return out


def bias_from_outcomes(outcomes):
    """Laplace-smoothed edge validity ``(valid + 1) / (worlds + 2)``.

    ``outcomes`` is a ``worlds x edges`` 0/1 matrix.
    """
    outcomes = np.atleast_2d(outcomes)
    if outcomes.shape[0] < 1:
        raise ValueError("need at least one world")
    return (outcomes.sum(axis=0) + 1.0) / (outcomes.shape[0] + 2.0)


def estimate_bias(graph, world_sampler, num_worlds):
    """Smoothed per-edge validity over ``num_worlds`` worlds from ``world_sampler(i)``."""
    if num_worlds < 1:
        raise ValueError("need at least one world")
    outcomes = np.array([collide(graph, world_sampler(i)) for i in range(num_worlds)])
    return bias_from_outcomes(outcomes)
