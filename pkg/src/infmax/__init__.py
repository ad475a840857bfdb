"""Fused, lane-batched greedy influence maximization for undirected graphs
under the independent cascade model, with classical simulation-based
reference implementations for cross-checking."""

from .estimator import InfluenceMaximizer
from .evaluation import evaluate_seeds, run_benchmark, sampling_cdf
from .graph import (Constant, FromFile, Graph, NormalClamped, UniformRange,
                    WeightedCascade, apply_weights, generate_er, generate_rmat,
                    load_edge_list, load_graph, parse_weight_scheme)
from .hashing import (H_MAX, LANE_WIDTH, EdgeHashTable, SimulationRandoms,
                      build_hash_table, lane_membership, murmur3_32, sample_prob)
from .pipeline import FusedRun, run_fused
from .propagation import component_sizes, initial_marginal_gains, propagate
from .selection import SelectionResult, select_seeds

__version__ = "0.1.0"

__all__ = [
    "Constant",
    "EdgeHashTable",
    "FromFile",
    "FusedRun",
    "Graph",
    "H_MAX",
    "InfluenceMaximizer",
    "LANE_WIDTH",
    "NormalClamped",
    "SelectionResult",
    "SimulationRandoms",
    "UniformRange",
    "WeightedCascade",
    "apply_weights",
    "build_hash_table",
    "component_sizes",
    "evaluate_seeds",
    "generate_er",
    "generate_rmat",
    "initial_marginal_gains",
    "lane_membership",
    "load_edge_list",
    "load_graph",
    "murmur3_32",
    "parse_weight_scheme",
    "propagate",
    "run_benchmark",
    "run_fused",
    "sample_prob",
    "sampling_cdf",
    "select_seeds",
]
