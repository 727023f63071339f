"""Benchmark dataset generators."""

from .bundle import DatasetBundle, bundle_from_dict, dumps_bundle, load_bundle, save_bundle
from .graphs import (AttemptCapExceeded, DisconnectedStartGoal, Graph2D, default_radius,
                     gbg_bundle, gen_gbg_paths, gen_rgg, shortest_path)
from .planning import EmptyLibrary, build_path_library, candidate_paths, planning_bundle
from .synthetic import (InvalidParams, disparity_bundle, gen_disparity, gen_synthetic,
                        gen_synthetic_instance)
from .worlds import (KINDS, WORLD_DEFAULTS, WorldMap, bias_from_outcomes, collide,
                     estimate_bias, gen_world, sample_edge_outcomes)
