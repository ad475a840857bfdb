"""Undirected weighted graphs in CSR form.

Every undirected edge {u, v} occupies two directed slots, (u, v) and (v, u),
so ``m == 2 * number_of_undirected_edges``.  Neighbor lists are sorted
ascending, which fixes the traversal order and keeps all downstream
computations reproducible.

The module also owns edge weighting (the diffusion-probability schemes),
plain-text edge-list I/O, a binary CSR cache, and two small synthetic
generators used by the benchmark harness.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Union

import numpy as np

# Component labels are signed 32-bit, so vertex ids must fit in int32.
MAX_VERTICES = 2**31

_CACHE_MAGIC = b"INFCSR1\x00"


class GraphFormatError(ValueError):
    """Unreadable or malformed graph input (carries a line number when known)."""


class ConstraintError(ValueError):
    """A structurally valid request that violates a documented limit."""


@dataclass(eq=False)
class Graph:
    """Symmetric CSR adjacency of an undirected weighted graph.

    Attributes
    ----------
    xadj : int64 array, shape (n + 1,)
        Offsets into ``adj``; the neighbors of ``v`` live in
        ``adj[xadj[v]:xadj[v + 1]]``.
    adj : int32 array, shape (m,)
        Neighbor vertex ids, sorted ascending within each row.
    weights : float64 array, shape (m,)
        Per-direction diffusion probabilities in [0, 1], aligned with ``adj``.
    orig_ids : int64 array, shape (n,)
        Original (pre-compaction) vertex labels, for reporting.
    """

    xadj: np.ndarray
    adj: np.ndarray
    weights: np.ndarray
    orig_ids: np.ndarray

    @property
    def n(self) -> int:
        return len(self.xadj) - 1

    @property
    def m(self) -> int:
        return len(self.adj)

    @property
    def num_undirected_edges(self) -> int:
        return self.m // 2

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.xadj)

    @cached_property
    def sources(self) -> np.ndarray:
        """Source vertex of every slot: the row-expanded form of xadj."""
        return np.repeat(np.arange(self.n, dtype=np.int32), self.degrees)

    @cached_property
    def canonical_slots(self) -> np.ndarray:
        """Slot indices with source < neighbor: one slot per undirected edge."""
        return np.flatnonzero(self.sources < self.adj)

    @cached_property
    def reciprocal_slots(self) -> np.ndarray:
        """reciprocal_slots[i] is the slot of (v, u) given slot i is (u, v)."""
        lo = np.minimum(self.sources, self.adj)
        hi = np.maximum(self.sources, self.adj)
        order = np.lexsort((hi, lo))
        if self.m % 2 or not (
            np.array_equal(lo[order[0::2]], lo[order[1::2]])
            and np.array_equal(hi[order[0::2]], hi[order[1::2]])
        ):
            raise GraphFormatError("adjacency is not symmetric")
        recip = np.empty(self.m, dtype=np.int64)
        recip[order[0::2]] = order[1::2]
        recip[order[1::2]] = order[0::2]
        return recip

    def neighbors(self, v: int) -> np.ndarray:
        return self.adj[self.xadj[v] : self.xadj[v + 1]]

    def neighbor_weights(self, v: int) -> np.ndarray:
        return self.weights[self.xadj[v] : self.xadj[v + 1]]

    def slot(self, u: int, v: int) -> int:
        """Index of directed slot (u, v); KeyError if the edge is absent."""
        row = self.neighbors(u)
        k = int(np.searchsorted(row, v))
        if k == len(row) or row[k] != v:
            raise KeyError(f"no edge ({u}, {v})")
        return int(self.xadj[u]) + k

    def with_weights(self, weights: np.ndarray) -> "Graph":
        """Same topology, new per-slot weights."""
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (self.m,):
            raise ValueError(f"expected {self.m} weights, got {w.shape}")
        if w.size and (w.min() < 0.0 or w.max() > 1.0):
            raise ConstraintError("weights must lie in [0, 1]")
        return Graph(self.xadj, self.adj, w, self.orig_ids)

    @classmethod
    def from_edges(cls, n, edges, weights=1.0, orig_ids=None) -> "Graph":
        """Build a CSR graph from distinct undirected edges on 0..n-1.

        ``edges`` is a sequence (or (k, 2) array) of vertex pairs; self-loops
        and duplicate pairs are rejected.  ``weights`` is a scalar or one
        value per undirected edge, copied to both directions.
        """
        if n < 0 or n >= MAX_VERTICES:
            raise ConstraintError(f"vertex count {n} outside [0, 2^31)")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                       dtype=np.int64).reshape(-1, 2)
        u, v = e[:, 0], e[:, 1]
        if e.size:
            if u.min() < 0 or v.min() < 0 or max(u.max(), v.max()) >= n:
                raise ValueError("edge endpoint outside 0..n-1")
            if (u == v).any():
                raise ValueError("self-loops are not allowed")
            key = np.minimum(u, v) * n + np.maximum(u, v)
            if len(np.unique(key)) != len(key):
                raise ValueError("duplicate undirected edges")
        w = np.broadcast_to(np.asarray(weights, dtype=np.float64), (len(e),))
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        ww = np.concatenate([w, w])
        order = np.lexsort((dst, src))
        xadj = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=xadj[1:])
        if orig_ids is None:
            orig_ids = np.arange(n, dtype=np.int64)
        return cls(xadj, dst[order].astype(np.int32), ww[order],
                   np.asarray(orig_ids, dtype=np.int64))


# ---------------------------------------------------------------------------
# Weight schemes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    """Every edge gets probability p in both directions."""
    p: float


@dataclass(frozen=True)
class UniformRange:
    """One uniform draw in [lo, hi] per undirected edge, both directions."""
    lo: float
    hi: float


@dataclass(frozen=True)
class NormalClamped:
    """One N(mean, std) draw per undirected edge, clamped into [0, 1]."""
    mean: float
    std: float


@dataclass(frozen=True)
class WeightedCascade:
    """weight(u, v) = 1 / degree(v): influencing v is diluted by its degree."""


@dataclass(frozen=True)
class FromFile:
    """Keep the weights already stored on the graph."""


WeightScheme = Union[Constant, UniformRange, NormalClamped, WeightedCascade, FromFile]


def parse_weight_scheme(text) -> WeightScheme:
    """Parse 'const:P', 'uniform:LO,HI', 'normal:MEAN,STD', 'wc', or 'file'.

    Already-constructed scheme objects pass through unchanged, so callers
    can accept either form.
    """
    if isinstance(text, (Constant, UniformRange, NormalClamped,
                         WeightedCascade, FromFile)):
        return text
    name, _, args = text.partition(":")
    try:
        if name == "const":
            p = float(args)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} outside [0, 1]")
            return Constant(p)
        if name == "uniform":
            lo, hi = (float(a) for a in args.split(","))
            if not 0.0 <= lo <= hi <= 1.0:
                raise ValueError(f"range [{lo}, {hi}] invalid")
            return UniformRange(lo, hi)
        if name == "normal":
            mean, std = (float(a) for a in args.split(","))
            if not 0.0 <= mean <= 1.0 or std < 0.0:
                raise ValueError(f"normal({mean}, {std}) parameters invalid")
            return NormalClamped(mean, std)
        if name == "wc" and not args:
            return WeightedCascade()
        if name == "file" and not args:
            return FromFile()
    except ValueError as exc:
        raise ValueError(f"bad weight scheme {text!r}: {exc}") from None
    raise ValueError(f"unknown weight scheme {text!r}")


def apply_weights(g: Graph, scheme: WeightScheme, rng_seed: int = 0) -> Graph:
    """Assign diffusion probabilities per ``scheme``; returns a new Graph.

    Constant/Uniform/Normal draw once per undirected edge (in canonical-slot
    order, seeded by ``rng_seed``) and copy the value to both directions, so
    the result is symmetric.  WeightedCascade assigns weight(u, v) =
    1/degree(v) per direction, which is generally asymmetric.
    """
    w = np.empty(g.m, dtype=np.float64)
    canon = g.canonical_slots
    if isinstance(scheme, Constant):
        if not 0.0 <= scheme.p <= 1.0:
            raise ConstraintError(f"constant weight {scheme.p} outside [0, 1]")
        w.fill(scheme.p)
    elif isinstance(scheme, UniformRange):
        lo, hi = scheme.lo, scheme.hi
        if not (0.0 <= lo <= hi <= 1.0):
            raise ConstraintError(f"uniform range [{lo}, {hi}] invalid")
        draws = np.random.default_rng(rng_seed).uniform(lo, hi, size=len(canon))
        w[canon] = draws
        w[g.reciprocal_slots[canon]] = draws
    elif isinstance(scheme, NormalClamped):
        if not 0.0 <= scheme.mean <= 1.0 or scheme.std < 0.0:
            raise ConstraintError(
                f"normal({scheme.mean}, {scheme.std}) parameters invalid")
        draws = np.random.default_rng(rng_seed).normal(
            scheme.mean, scheme.std, size=len(canon))
        np.clip(draws, 0.0, 1.0, out=draws)
        w[canon] = draws
        w[g.reciprocal_slots[canon]] = draws
    elif isinstance(scheme, WeightedCascade):
        w = 1.0 / g.degrees[g.adj]
    elif isinstance(scheme, FromFile):
        return g.with_weights(g.weights)
    else:
        raise TypeError(f"unknown weight scheme {scheme!r}")
    return g.with_weights(w)


# ---------------------------------------------------------------------------
# Edge-list text I/O
# ---------------------------------------------------------------------------

def load_edge_list(path, directed_input: bool = False) -> Graph:
    """Load a whitespace-separated "u v [w]" edge list into a symmetric CSR.

    Lines whose first non-blank character is '#' are comments.  Duplicate
    undirected edges collapse to the first occurrence (first weight wins),
    self-loops are dropped, and vertex ids are compacted to 0..n-1 in order
    of first appearance.  ``directed_input`` records that the file lists arcs
    rather than edges; either way the union of both directions is stored, so
    the flag does not change the result under the collapse rule.

    Raises GraphFormatError with a line number for malformed lines, and for
    files that yield no edges at all.
    """
    ids: dict[int, int] = {}
    seen: set[tuple[int, int]] = set()
    us: list[int] = []
    vs: list[int] = []
    ws: list[float] = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise GraphFormatError(f"cannot open {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) not in (2, 3):
                raise GraphFormatError(
                    f"{path}: line {lineno}: expected 'u v [w]', got {len(parts)} fields")
            try:
                a, b = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise GraphFormatError(
                    f"{path}: line {lineno}: non-numeric field in {stripped!r}") from None
            if not 0.0 <= w <= 1.0:
                raise GraphFormatError(
                    f"{path}: line {lineno}: weight {w} outside [0, 1]")
            if a == b:
                continue
            cu = ids.setdefault(a, len(ids))
            cv = ids.setdefault(b, len(ids))
            key = (cu, cv) if cu < cv else (cv, cu)
            if key in seen:
                continue
            seen.add(key)
            us.append(cu)
            vs.append(cv)
            ws.append(w)
    if not us:
        raise GraphFormatError(f"{path}: no edges")
    n = len(ids)
    if n >= MAX_VERTICES:
        raise ConstraintError(f"{path}: {n} vertices exceed the 2^31 id limit")
    orig = np.empty(n, dtype=np.int64)
    for original, compact in ids.items():
        orig[compact] = original
    return Graph.from_edges(n, np.column_stack([us, vs]), np.asarray(ws), orig)


def write_edge_list(g: Graph, path) -> None:
    """Write one "u v w" line per undirected edge, using original ids.

    Edges are ordered so that reloading reproduces the same id compaction:
    each vertex k is introduced (in id order) by an edge to an
    already-introduced neighbor, or by the edge (k, k+1) when k starts a new
    line pair; graphs that came from load_edge_list always admit such an
    order, and the remaining edges follow sorted.  Weight of slot (u, v) with
    u < v is the one written (schemes are symmetric except WC, whose exact
    per-direction values are re-derivable from the topology).

    Isolated vertices have no line to appear on; a graph containing any is
    only round-trippable through the binary CSR cache.
    """
    canon = g.canonical_slots
    src = g.sources[canon]
    dst = g.adj[canon]
    emitted = np.zeros(len(canon), dtype=bool)
    # canonical edge index lookup per (u, v), u < v
    key_order = np.lexsort((dst, src))
    lines: list[str] = []
    introduced = 0

    def edge_index(u: int, v: int) -> int:
        # binary search in the (src, dst)-sorted canonical list
        k = np.searchsorted(src[key_order], u, side="left")
        while k < len(key_order) and src[key_order[k]] == u:
            if dst[key_order[k]] == v:
                return int(key_order[k])
            k += 1
        return -1

    def emit(i: int) -> None:
        nonlocal introduced
        u, v = int(src[i]), int(dst[i])
        lines.append(f"{g.orig_ids[u]} {g.orig_ids[v]} {float(g.weights[g.slot(u, v)])!r}")
        emitted[i] = True
        introduced = max(introduced, v + 1)

    for k in range(g.n):
        if k < introduced:
            continue
        prior = [int(j) for j in g.neighbors(k) if j < k]
        if prior:
            emit(edge_index(min(prior), k))
            introduced = max(introduced, k + 1)
            continue
        i = edge_index(k, k + 1) if k + 1 < g.n else -1
        if i < 0:
            # not a loader-produced ordering; fall back to sorted emission
            break
        emit(i)
    for i in key_order:
        if not emitted[i]:
            emit(int(i))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Binary CSR cache
# ---------------------------------------------------------------------------

def save_csr(g: Graph, path) -> None:
    """Binary cache: magic, little-endian u64 n and m, then xadj (int64),
    adj (int32), weights (float64), orig_ids (int64), all little-endian."""
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<QQ", g.n, g.m))
        fh.write(g.xadj.astype("<i8").tobytes())
        fh.write(g.adj.astype("<i4").tobytes())
        fh.write(g.weights.astype("<f8").tobytes())
        fh.write(g.orig_ids.astype("<i8").tobytes())


def load_csr(path) -> Graph:
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise GraphFormatError(f"cannot open {path}: {exc}") from exc
    if blob[:8] != _CACHE_MAGIC:
        raise GraphFormatError(f"{path}: not a CSR cache (bad magic)")
    n, m = struct.unpack_from("<QQ", blob, 8)
    off = 24
    expect = 24 + 8 * (n + 1) + 4 * m + 8 * m + 8 * n
    if len(blob) != expect:
        raise GraphFormatError(f"{path}: truncated CSR cache")
    xadj = np.frombuffer(blob, "<i8", n + 1, off).astype(np.int64)
    off += 8 * (n + 1)
    adj = np.frombuffer(blob, "<i4", m, off).astype(np.int32)
    off += 4 * m
    weights = np.frombuffer(blob, "<f8", m, off).astype(np.float64)
    off += 8 * m
    orig = np.frombuffer(blob, "<i8", n, off).astype(np.int64)
    return Graph(xadj, adj, weights, orig)


def load_graph(path) -> Graph:
    """Dispatch on the cache magic so both formats load through one entry."""
    with open(path, "rb") as fh:
        head = fh.read(8)
    if head == _CACHE_MAGIC:
        return load_csr(path)
    return load_edge_list(path)


# ---------------------------------------------------------------------------
# Synthetic generators (benchmark plumbing)
# ---------------------------------------------------------------------------

def _dedup_first(u: np.ndarray, v: np.ndarray, n: int) -> np.ndarray:
    """Indices of the first occurrence of each undirected pair, in draw order."""
    key = np.minimum(u, v) * np.int64(n) + np.maximum(u, v)
    _, first = np.unique(key, return_index=True)
    return np.sort(first)


def generate_er(n: int, avg_degree: float, seed: int = 0) -> Graph:
    """Erdos-Renyi-style graph with ~n*avg_degree/2 distinct undirected edges."""
    target = int(round(n * avg_degree / 2))
    rng = np.random.default_rng(seed)
    u = np.empty(0, dtype=np.int64)
    v = np.empty(0, dtype=np.int64)
    while True:
        need = max(1024, int((target - len(u)) * 1.3))
        cand = rng.integers(0, n, size=(need, 2))
        cand = cand[cand[:, 0] != cand[:, 1]]
        u = np.concatenate([u, cand[:, 0]])
        v = np.concatenate([v, cand[:, 1]])
        keep = _dedup_first(u, v, n)
        u, v = u[keep], v[keep]
        if len(u) >= target:
            break
    return Graph.from_edges(n, np.column_stack([u[:target], v[:target]]))


def generate_rmat(scale: int, avg_degree: float, seed: int = 0,
                  probs=(0.45, 0.22, 0.22, 0.11)) -> Graph:
    """Recursive-matrix graph on 2**scale vertices (skewed degrees)."""
    n = 1 << scale
    target = int(round(n * avg_degree / 2))
    cum = np.cumsum(probs[:3]) / sum(probs)
    rng = np.random.default_rng(seed)
    u = np.empty(0, dtype=np.int64)
    v = np.empty(0, dtype=np.int64)
    while True:
        need = max(1024, int((target - len(u)) * 1.5))
        q = np.searchsorted(cum, rng.random((need, scale)))
        uu = (q >> 1).dot(1 << np.arange(scale - 1, -1, -1, dtype=np.int64))
        vv = (q & 1).dot(1 << np.arange(scale - 1, -1, -1, dtype=np.int64))
        keep = uu != vv
        u = np.concatenate([u, uu[keep]])
        v = np.concatenate([v, vv[keep]])
        first = _dedup_first(u, v, n)
        u, v = u[first], v[first]
        if len(u) >= target:
            break
    return Graph.from_edges(n, np.column_stack([u[:target], v[:target]]))
