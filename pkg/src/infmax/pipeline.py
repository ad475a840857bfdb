"""End-to-end fused pipeline: hash, propagate, memoize, select."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .hashing import EdgeHashTable, SimulationRandoms, build_hash_table
from .propagation import component_sizes_and_gains, propagate
from .selection import SelectionResult, select_seeds


@dataclass
class FusedRun:
    """Everything a caller might want back from one fused selection run."""

    graph: Graph
    selection: SelectionResult
    labels: np.ndarray
    sizes: np.ndarray
    table: EdgeHashTable
    randoms: SimulationRandoms
    timings: dict = field(default_factory=dict)

    @property
    def seeds(self) -> list:
        return self.selection.seeds

    @property
    def spread(self) -> float:
        return self.selection.spread

    @property
    def spread_se(self) -> float:
        return self.selection.spread_se(self.labels, self.sizes)

    def original_seed_ids(self) -> list:
        return [int(self.graph.orig_ids[s]) for s in self.selection.seeds]


def run_fused(g: Graph, k: int, num_simulations: int = 256,
              master_seed: int = 0, n_threads: int = 1) -> FusedRun:
    """Select k seeds over ``num_simulations`` memoized implicit samples."""
    timings: dict[str, float] = {}
    t = time.perf_counter()
    table = build_hash_table(g)
    randoms = SimulationRandoms(num_simulations, master_seed)
    timings["hash"] = time.perf_counter() - t

    t = time.perf_counter()
    labels = propagate(g, table, randoms, n_threads=n_threads)
    timings["propagate"] = time.perf_counter() - t

    t = time.perf_counter()
    sizes, gains = component_sizes_and_gains(labels, randoms.num_scored)
    timings["memoize"] = time.perf_counter() - t

    t = time.perf_counter()
    selection = select_seeds(g, labels, sizes, gains, k,
                             num_scored=randoms.num_scored)
    timings["select"] = time.perf_counter() - t
    timings["total"] = sum(timings.values())
    return FusedRun(g, selection, labels, sizes, table, randoms, timings)
