"""Greedy seed selection over memoized component labels (CELF).

The first seed is the argmax of the initial gains; every later seed comes
from a lazy priority queue whose entries are stale upper bounds (gains only
shrink as seeds accumulate, by submodularity on the fixed sample set).  A
vertex is committed the moment its queue entry is known to be fresh;
otherwise its gain is recomputed from the label matrix — a pure table
lookup, no graph traversal — and the vertex is reinserted.

All gains are integer sums in vertex x simulation units; dividing by R only
happens in reporting, so queue comparisons never touch floats.
"""

from __future__ import annotations

import csv
import heapq
from dataclasses import dataclass, field

import numpy as np

from .graph import ConstraintError, Graph


@dataclass
class TraceRecord:
    """One CELF dequeue: what was popped, what it was worth, what happened."""

    vertex: int
    stale_gain: int
    fresh_gain: int
    committed: bool
    seeds_before: int


@dataclass
class SeedState:
    """Mutable selection state: chosen seeds and per-lane owned labels.

    ``owned[l, r]`` marks component label l of lane r as belonging to some
    seed — the dense equivalent of a per-simulation label set (the set view
    is available via :meth:`seed_label_sets`).
    """

    num_scored: int
    owned: np.ndarray                 # (n, R) bool
    seeds: list = field(default_factory=list)
    sigma: int = 0                    # running spread sum, integer units

    @classmethod
    def empty(cls, n: int, num_scored: int) -> "SeedState":
        return cls(num_scored, np.zeros((n, num_scored), dtype=bool))

    def seed_label_sets(self) -> list:
        """Per-simulation sets of owned labels (each has at most |seeds| entries)."""
        out = [set() for _ in range(self.num_scored)]
        labels, lanes = np.nonzero(self.owned)
        for l, r in zip(labels.tolist(), lanes.tolist()):
            out[r].add(l)
        return out


def marginal_gain(u: int, labels: np.ndarray, sizes: np.ndarray,
                  state: SeedState) -> int:
    """Spread gained by adding u: its component size in every lane where that
    component is not already owned by a seed."""
    lu = labels[u, : state.num_scored]
    cols = np.arange(state.num_scored)
    contrib = np.where(state.owned[lu, cols], 0, sizes[lu, cols])
    return int(contrib.sum(dtype=np.int64))


def commit_seed(u: int, gain: int, labels: np.ndarray, state: SeedState) -> SeedState:
    """Take ownership of u's component in every lane and bank its gain."""
    if u in state.seeds:
        raise AssertionError(f"vertex {u} committed twice")
    lu = labels[u, : state.num_scored]
    state.owned[lu, np.arange(state.num_scored)] = True
    state.seeds.append(int(u))
    state.sigma += int(gain)
    return state


def recompute_sigma(labels: np.ndarray, state: SeedState) -> int:
    """Independent consistency check: count vertices in owned components."""
    cols = np.arange(state.num_scored)
    return int(state.owned[labels[:, : state.num_scored], cols]
               .sum(dtype=np.int64))


@dataclass
class SelectionResult:
    seeds: list
    sigma: int
    num_scored: int
    trace: list
    gains: list
    state: SeedState

    @property
    def spread(self) -> float:
        """sigma / R: the memoized influence estimate in vertices."""
        return self.sigma / self.num_scored

    def spread_se(self, labels: np.ndarray, sizes: np.ndarray) -> float:
        """Standard error of the spread estimate over the scored simulations."""
        cols = np.arange(self.num_scored)
        per_sim = self.state.owned[labels[:, : self.num_scored], cols] \
            .sum(axis=0, dtype=np.int64)
        if self.num_scored < 2:
            return 0.0
        return float(per_sim.std(ddof=1) / np.sqrt(self.num_scored))


def select_seeds(g: Graph, labels: np.ndarray, sizes: np.ndarray,
                 initial_gains: np.ndarray, k: int,
                 num_scored: int | None = None) -> SelectionResult:
    """Pick k seeds greedily; ties always break toward the smaller vertex id.

    ``num_scored`` bounds the lanes that contribute to gains (default: the
    full label width); the trace records every dequeue for test introspection.
    """
    n = g.n
    if k < 1:
        raise ConstraintError(f"need at least one seed, got k={k}")
    if k > n:
        raise ConstraintError(f"k={k} exceeds vertex count n={n}")
    num_scored = labels.shape[1] if num_scored is None else int(num_scored)
    state = SeedState.empty(n, num_scored)
    # (-gain, vertex): heapq pops the max gain, smallest id on ties
    queue = [(-int(initial_gains[v]), v) for v in range(n)]
    heapq.heapify(queue)
    fresh_at = np.zeros(n, dtype=np.int64)  # seed count when gain was computed
    trace: list[TraceRecord] = []
    gains: list[int] = []
    while len(state.seeds) < k:
        neg, u = heapq.heappop(queue)
        stale = -neg
        if fresh_at[u] == len(state.seeds):
            commit_seed(u, stale, labels, state)
            trace.append(TraceRecord(u, stale, stale, True, len(state.seeds) - 1))
            gains.append(stale)
        else:
            fresh = marginal_gain(u, labels, sizes, state)
            fresh_at[u] = len(state.seeds)
            heapq.heappush(queue, (-fresh, u))
            trace.append(TraceRecord(u, stale, fresh, False, len(state.seeds)))
    return SelectionResult(list(state.seeds), state.sigma, num_scored,
                           trace, gains, state)


def write_trace_csv(trace: list, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["vertex", "stale_gain", "fresh_gain", "committed",
                         "seeds_before"])
        for rec in trace:
            writer.writerow([rec.vertex, rec.stale_gain, rec.fresh_gain,
                             int(rec.committed), rec.seeds_before])
