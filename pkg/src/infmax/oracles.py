"""Reference algorithms: explicit sampling, BFS reachability, greedy drivers,
and an exact expected-influence oracle for tiny graphs.

Everything here exists to be slow and obviously correct.  The fused pipeline
is tested against these implementations; keep them free of clever
vectorization so a defect cannot hide in both places at once.

Membership semantics match the fused kernel: each undirected edge has one
inclusion decision per simulation, using the symmetrized threshold
``max(floor(w_uv * H_MAX), floor(w_vu * H_MAX))`` (identical to the per-slot
threshold for every symmetric weight scheme).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .graph import ConstraintError, Graph
from .hashing import EdgeHashTable, SimulationRandoms, slot_thresholds

MAX_EXACT_EDGES = 22


@dataclass(eq=False)
class SampledSubgraph:
    """One materialized sample: a bitmap over adjacency slots.

    edge_in is symmetric across reciprocal slots by construction.
    """

    graph: Graph
    edge_in: np.ndarray  # (m,) bool


class HashSampler:
    """Materializes the same implicit samples the fused kernel traverses."""

    def __init__(self, g: Graph, table: EdgeHashTable, randoms: SimulationRandoms):
        self.graph = g
        self.table = table
        self.randoms = randoms
        self.thresholds = slot_thresholds(g)

    def sample(self, r: int) -> SampledSubgraph:
        if not 0 <= r < self.randoms.padded:
            raise ValueError(f"simulation index {r} outside [0, {self.randoms.padded})")
        probe = np.int32(self.randoms.values[r]) ^ self.table.hashes
        return SampledSubgraph(self.graph, probe < self.thresholds)


class RngSampler:
    """Classical sampler: one fresh uniform draw per undirected edge per call.

    The simulation index argument is accepted for interface parity with
    HashSampler and ignored — every call consumes fresh randomness.
    """

    def __init__(self, g: Graph, rng):
        self.graph = g
        self.rng = np.random.default_rng(rng) if isinstance(rng, int) else rng
        canon = g.canonical_slots
        self._canon = canon
        self._recip = g.reciprocal_slots[canon]
        self._probs = np.maximum(g.weights[canon], g.weights[self._recip])

    def sample(self, r: int = 0) -> SampledSubgraph:
        edge_in = np.zeros(self.graph.m, dtype=bool)
        hit = self.rng.random(len(self._canon)) < self._probs
        edge_in[self._canon] = hit
        edge_in[self._recip] = hit
        return SampledSubgraph(self.graph, edge_in)


def sample_explicit(g: Graph, table: EdgeHashTable, randoms: SimulationRandoms,
                    r: int) -> SampledSubgraph:
    """Materialize simulation r of the hash-defined sample family."""
    return HashSampler(g, table, randoms).sample(r)


def sample_rng(g: Graph, rng) -> SampledSubgraph:
    """One classical per-edge-uniform sample (accepts an rng or a seed)."""
    return RngSampler(g, rng).sample()


def reachability(sub: SampledSubgraph, seeds) -> set:
    """BFS closure of the seed set over sampled edges."""
    g = sub.graph
    edge_in = sub.edge_in
    seen = set()
    stack = []
    for s in seeds:
        s = int(s)
        if not 0 <= s < g.n:
            raise ValueError(f"seed {s} outside vertex range")
        if s not in seen:
            seen.add(s)
            stack.append(s)
    while stack:
        u = stack.pop()
        for k in range(int(g.xadj[u]), int(g.xadj[u + 1])):
            if edge_in[k]:
                v = int(g.adj[k])
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
    return seen


def bfs_component_labels(sub: SampledSubgraph) -> np.ndarray:
    """Min-id component labels of one sample by plain BFS (oracle for the
    fused label matrix)."""
    g = sub.graph
    xadj = g.xadj.tolist()
    adj = g.adj.tolist()
    edge_in = sub.edge_in.tolist()
    labels = [-1] * g.n
    for start in range(g.n):
        if labels[start] != -1:
            continue
        labels[start] = start
        stack = [start]
        while stack:
            u = stack.pop()
            for k in range(xadj[u], xadj[u + 1]):
                if edge_in[k]:
                    v = adj[k]
                    if labels[v] == -1:
                        labels[v] = start
                        stack.append(v)
    return np.asarray(labels, dtype=np.int32)


def new_greedy(g: Graph, k: int, num_sims: int, sampler):
    """Greedy with re-simulation: every outer iteration scores all candidates
    over ``num_sims`` fresh samples (sampler indices i*num_sims + r), then
    takes the argmax among non-seeds, smaller id on ties.

    Returns (seed list, final gain array).
    """
    if k < 1 or k > g.n:
        raise ConstraintError(f"k={k} invalid for n={g.n}")
    seeds: list[int] = []
    gains = np.zeros(g.n, dtype=np.int64)
    for i in range(k):
        gains = np.zeros(g.n, dtype=np.int64)
        for r in range(num_sims):
            sub = sampler.sample(i * num_sims + r)
            labels = bfs_component_labels(sub)
            sizes = np.bincount(labels, minlength=g.n)
            contrib = sizes[labels].astype(np.int64)
            if seeds:
                seeded = np.zeros(g.n, dtype=bool)
                seeded[np.unique(labels[seeds])] = True
                contrib[seeded[labels]] = 0
            gains += contrib
        masked = gains.copy()
        masked[seeds] = -1
        seeds.append(int(np.argmax(masked)))
    return seeds, gains


def rand_cas(g: Graph, seeds, num_sims: int, sampler, start_index: int = 0) -> float:
    """Mean reached-set size of ``seeds`` over ``num_sims`` samples."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError("seed set must be nonempty")
    total = 0
    for r in range(num_sims):
        total += len(reachability(sampler.sample(start_index + r), seeds))
    return total / num_sims


def mix_greedy(g: Graph, k: int, num_sims: int, sampler) -> list:
    """Greedy over one fixed family of samples: a single scoring pass for the
    first seed, then CELF where each refresh walks the same ``num_sims``
    materialized samples by BFS.  Tie-breaking (smaller vertex id) and
    integer gain arithmetic match select_seeds exactly, so on shared samples
    the seed sequences must agree.
    """
    if k < 1 or k > g.n:
        raise ConstraintError(f"k={k} invalid for n={g.n}")
    worlds = [sampler.sample(r) for r in range(num_sims)]
    gains = np.zeros(g.n, dtype=np.int64)
    for sub in worlds:
        labels = bfs_component_labels(sub)
        sizes = np.bincount(labels, minlength=g.n)
        gains += sizes[labels]
    queue = [(-int(gains[v]), v) for v in range(g.n)]
    heapq.heapify(queue)
    fresh_at = [0] * g.n
    seeds: list[int] = []
    sigma = 0  # integer sum of reached sizes over worlds
    while len(seeds) < k:
        neg, u = heapq.heappop(queue)
        if fresh_at[u] == len(seeds):
            seeds.append(u)
            sigma += -neg
        else:
            reach_with_u = sum(len(reachability(sub, seeds + [u])) for sub in worlds)
            fresh = reach_with_u - sigma
            fresh_at[u] = len(seeds)
            heapq.heappush(queue, (-fresh, u))
    return seeds


def _canonical_edges(g: Graph):
    """(u, v, p) per undirected edge with the symmetrized probability."""
    canon = g.canonical_slots
    recip = g.reciprocal_slots[canon]
    p = np.maximum(g.weights[canon], g.weights[recip])
    return list(zip(g.sources[canon].tolist(), g.adj[canon].tolist(), p.tolist()))


def exact_influence(g: Graph, seeds) -> float:
    """Exact expected influence of ``seeds`` by live-edge world enumeration.

    Branches only on boundary edges (exactly one endpoint reached); edges
    whose state cannot affect the reached set are marginalized away, so the
    sum equals the full 2^|E| enumeration but runs in the size of the
    reachable world tree.  Deterministic; limited to MAX_EXACT_EDGES edges.
    """
    edges = _canonical_edges(g)
    if len(edges) > MAX_EXACT_EDGES:
        raise ConstraintError(
            f"{len(edges)} undirected edges exceed the exact-oracle limit "
            f"of {MAX_EXACT_EDGES}")
    seeds = sorted({int(s) for s in seeds})
    if any(not 0 <= s < g.n for s in seeds):
        raise ValueError("seed outside vertex range")
    if not seeds:
        return 0.0
    reached = [False] * g.n
    for s in seeds:
        reached[s] = True
    blocked = [False] * len(edges)
    count = len(seeds)
    total = 0.0

    def boundary() -> int:
        for i, (u, v, p) in enumerate(edges):
            if not blocked[i] and p > 0.0 and (reached[u] != reached[v]):
                return i
        return -1

    def explore(prob: float) -> None:
        nonlocal count, total
        i = boundary()
        if i < 0:
            total += prob * count
            return
        u, v, p = edges[i]
        fresh = v if reached[u] else u
        reached[fresh] = True
        count += 1
        explore(prob * p)
        reached[fresh] = False
        count -= 1
        if p < 1.0:
            blocked[i] = True
            explore(prob * (1.0 - p))
            blocked[i] = False

    explore(1.0)
    return total
