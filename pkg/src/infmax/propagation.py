"""Fused, lane-batched min-label propagation over R implicit samples.

Each simulation r induces a sampled subgraph that is never materialized:
membership of a slot is recomputed on demand as ``(X[r] ^ hash) < floor(w *
H_MAX)``.  Propagation drives an n x R label matrix (one row of R 32-bit
labels per vertex, initially the vertex id) to the unique fixpoint where
every sampled edge connects equal labels; the converged label of a vertex in
lane r is the minimum vertex id of its component in sample r.

Sweeps come in three shapes chosen by estimated work:

* index: when every edge shares one threshold t, the live set
  ``{h : (x ^ h) < t}`` is a union of at most 31 aligned intervals, so the
  first sweep can enumerate live (edge, lane) pairs directly from a sorted
  copy of the edge hashes instead of testing all m x R cells (subcritical
  graphs, where almost every cell is dead);
* dense: recompute the min over all incoming slots for every destination,
  vectorized over whole lane rows (early sweeps, heavy frontiers);
* sparse: push only the (vertex, lane) pairs whose label changed in the
  previous sweep to their live neighbors, then group-min per destination
  (late sweeps, thin frontiers).

All shapes reach the same fixpoint in any processing order and with any
thread count (min-propagation is confluent), which is what the tests pin
down: the frontier/threading strategy is free to differ from run to run,
the converged matrix is not.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .hashing import LANE_WIDTH, EdgeHashTable, SimulationRandoms, slot_thresholds

_INT32_MAX = np.int32(np.iinfo(np.int32).max)

# cells (slot x lane entries) processed per vectorized block; bounds the
# size of the per-block temporaries to a few tens of MB
_BLOCK_CELLS = 1 << 22

# a sparse sweep must be at least this factor cheaper than a dense one
_SPARSE_FACTOR = 8


@dataclass
class PropagateStats:
    """Per-run introspection: sweep count, frontier decay, label-sum trace."""

    sweeps: int = 0
    changed_pairs: list = field(default_factory=list)
    modes: list = field(default_factory=list)
    label_sums: list = field(default_factory=list)


def _row_slots(xadj: np.ndarray, degrees: np.ndarray, rows: np.ndarray):
    """All adjacency-slot indices of ``rows``, concatenated in row order."""
    counts = degrees[rows]
    total = int(counts.sum())
    shift = np.zeros(len(rows), dtype=np.int64)
    np.cumsum(counts[:-1], out=shift[1:])
    slots = np.repeat(xadj[rows] - shift, counts) + np.arange(total)
    return slots, counts


def _apply_candidates(labels, dst, lane, vals, num_lanes):
    """Group-min candidate values per (destination, lane) and scatter-write.

    Callers guarantee every candidate strictly improves on the current
    label, so each surviving group leader is a real change.
    """
    if len(dst) == 0:
        return None
    n = labels.shape[0]
    key = dst.astype(np.int64) * num_lanes + lane
    val_bits = max(1, int(n - 1).bit_length())
    if (int(n) * num_lanes - 1).bit_length() + val_bits <= 62:
        # pack (key, value) into one word so a single sort both groups and
        # orders each group by value
        packed = (key << val_bits) | vals
        packed.sort()
        key = packed >> val_bits
        lead = np.ones(len(key), dtype=bool)
        lead[1:] = key[1:] != key[:-1]
        key = key[lead]
        vals = (packed[lead] & ((1 << val_bits) - 1)).astype(np.int32)
    else:
        order = np.lexsort((vals, key))
        key = key[order]
        vals = vals[order]
        lead = np.ones(len(key), dtype=bool)
        lead[1:] = key[1:] != key[:-1]
        key = key[lead]
        vals = vals[lead]
    drows = (key // num_lanes).astype(np.int32)
    dlanes = (key % num_lanes).astype(np.int32)
    labels[drows, dlanes] = vals
    return drows, dlanes


def _xor_below(x, t: int):
    """Aligned intervals whose union is {h : (h ^ x) < t}, for a vector x.

    For every set bit i of t the h with (h ^ x) matching t above bit i and
    zero at bit i form one aligned block of size 2**i; XOR by x keeps it
    aligned.  Returns (starts, sizes) with one column per set bit.
    """
    x = np.asarray(x, dtype=np.int64)
    bits = [i for i in range(31) if (t >> i) & 1]
    starts = np.empty((len(x), len(bits)), dtype=np.int64)
    sizes = np.empty(len(bits), dtype=np.int64)
    for j, i in enumerate(bits):
        starts[:, j] = (((t ^ x) >> (i + 1)) << (i + 1)) | (x & (1 << i))
        sizes[j] = 1 << i
    return starts, sizes


def _index_sweep(g, hashes, t, X, labels, num_lanes, first_sweep):
    """One sweep via sorted-hash interval lookups (uniform threshold t).

    Enumerates the live (undirected edge, lane) pairs of every lane
    directly and relaxes labels across them; nothing is kept between
    sweeps, the enumeration is redone from (hashes, X, t) each time.
    Membership agrees bit for bit with the XOR test the other sweeps
    recompute.  On the first sweep labels are still identities, so only
    the low-id endpoint can improve the high-id one.
    """
    canon = g.canonical_slots
    h_canon = hashes[canon]
    order = np.argsort(h_canon)
    sorted_h = h_canon[order]
    lo_ids = g.sources[canon][order]
    hi_ids = g.adj[canon][order]

    starts, sizes = _xor_below(X, t)
    a = np.searchsorted(sorted_h, starts.ravel(), side="left")
    b = np.searchsorted(sorted_h, (starts + sizes[None, :]).ravel(), side="left")
    counts = b - a
    total = int(counts.sum())
    if total == 0:
        return None
    shift = np.zeros(len(counts), dtype=np.int64)
    np.cumsum(counts[:-1], out=shift[1:])
    idx = np.repeat(a - shift, counts) + np.arange(total)
    lane = np.repeat(
        np.repeat(np.arange(num_lanes, dtype=np.int64), starts.shape[1]), counts)
    if first_sweep:
        return _apply_candidates(labels, hi_ids[idx], lane, lo_ids[idx], num_lanes)
    lo = lo_ids[idx]
    hi = hi_ids[idx]
    l_lo = labels[lo, lane]
    l_hi = labels[hi, lane]
    fwd = l_lo < l_hi
    bwd = l_hi < l_lo
    return _apply_candidates(
        labels,
        np.concatenate([hi[fwd], lo[bwd]]),
        np.concatenate([lane[fwd], lane[bwd]]),
        np.concatenate([l_lo[fwd], l_hi[bwd]]),
        num_lanes)


def _dense_block(g, hashes, thr, X, labels, dests, first_sweep):
    """Recompute destination labels for one block; returns changed pairs."""
    slots, counts = _row_slots(g.xadj, g.degrees, dests)
    nbr = g.adj[slots]
    member = (X[None, :] ^ hashes[slots][:, None]) < thr[slots][:, None]
    if first_sweep:
        # labels are still identities, so the gather collapses to neighbor ids
        cand = np.where(member, nbr[:, None], _INT32_MAX)
    else:
        cand = labels[nbr]
        cand[~member] = _INT32_MAX
    starts = np.zeros(len(dests), dtype=np.int64)
    np.cumsum(counts[:-1], out=starts[1:])
    red = np.minimum.reduceat(cand, starts, axis=0)
    rows_local, lanes = np.nonzero(red < labels[dests])
    if len(rows_local) == 0:
        return None
    changed_rows = dests[rows_local]
    labels[changed_rows, lanes] = red[rows_local, lanes]
    return changed_rows.astype(np.int32), lanes.astype(np.int32)


def _dense_sweep(g, hashes, thr, X, labels, dests, first_sweep, n_threads):
    num_lanes = labels.shape[1]
    block_slots = max(1, _BLOCK_CELLS // max(1, num_lanes))

    def run_range(sub: np.ndarray):
        out = []
        cum = np.zeros(len(sub) + 1, dtype=np.int64)
        np.cumsum(g.degrees[sub], out=cum[1:])
        lo = 0
        while lo < len(sub):
            hi = int(np.searchsorted(cum, cum[lo] + block_slots))
            hi = max(lo + 1, min(hi, len(sub)))
            # a lone high-degree row may blow the budget; shrink toward it
            while hi > lo + 1 and (cum[hi] - cum[lo]) * num_lanes > _BLOCK_CELLS * 4:
                hi -= (hi - lo) // 2
            got = _dense_block(g, hashes, thr, X, labels, sub[lo:hi], first_sweep)
            if got is not None:
                out.append(got)
            lo = hi
        return out

    if n_threads <= 1 or len(dests) < 2 * n_threads:
        results = run_range(dests)
    else:
        cuts = np.linspace(0, len(dests), n_threads + 1).astype(np.int64)
        parts = [dests[cuts[i]:cuts[i + 1]] for i in range(n_threads)
                 if cuts[i] < cuts[i + 1]]
        with ThreadPoolExecutor(max_workers=len(parts)) as pool:
            results = [pair for sub in pool.map(run_range, parts) for pair in sub]
    if not results:
        return None
    rows = np.concatenate([r for r, _ in results])
    lanes = np.concatenate([l for _, l in results])
    return rows, lanes


def _sparse_candidates(g, hashes, thr, X, labels, rows, lanes):
    """Push labels[rows, lanes] along live slots; returns (dst, lane, value).

    ``thr`` is the per-slot threshold array, or a plain int when every slot
    shares one threshold (saves the gather on the hot path).
    """
    slots, counts = _row_slots(g.xadj, g.degrees, rows)
    lane_rep = np.repeat(lanes, counts)
    vals = np.repeat(labels[rows, lanes], counts)
    cut = thr[slots] if isinstance(thr, np.ndarray) else thr
    live = (X[lane_rep] ^ hashes[slots]) < cut
    dst = g.adj[slots[live]]
    lane_rep = lane_rep[live]
    vals = vals[live]
    better = vals < labels[dst, lane_rep]
    return dst[better], lane_rep[better], vals[better]


def _sparse_sweep(g, hashes, thr, X, labels, rows, lanes, n_threads):
    num_lanes = labels.shape[1]
    if n_threads > 1 and len(rows) > 4096:
        cuts = np.linspace(0, len(rows), n_threads + 1).astype(np.int64)
        spans = [(cuts[i], cuts[i + 1]) for i in range(n_threads) if cuts[i] < cuts[i + 1]]
        with ThreadPoolExecutor(max_workers=len(spans)) as pool:
            parts = list(pool.map(
                lambda s: _sparse_candidates(g, hashes, thr, X, labels,
                                             rows[s[0]:s[1]], lanes[s[0]:s[1]]),
                spans))
        dst = np.concatenate([p[0] for p in parts])
        lane = np.concatenate([p[1] for p in parts])
        vals = np.concatenate([p[2] for p in parts])
    else:
        dst, lane, vals = _sparse_candidates(g, hashes, thr, X, labels, rows, lanes)
    return _apply_candidates(labels, dst, lane, vals, num_lanes)


def propagate(g: Graph, table: EdgeHashTable, randoms: SimulationRandoms,
              num_simulations: int | None = None, n_threads: int = 1,
              return_stats: bool = False):
    """Converged (n, R) int32 label matrix over R implicit samples.

    ``num_simulations`` defaults to the padded width of ``randoms`` and must
    be a multiple of LANE_WIDTH.  With ``return_stats`` the result is a
    ``(labels, PropagateStats)`` tuple.
    """
    num_lanes = randoms.padded if num_simulations is None else int(num_simulations)
    if num_lanes < 1 or num_lanes % LANE_WIDTH:
        raise ValueError(f"simulation width {num_lanes} not a multiple of {LANE_WIDTH}")
    if num_lanes > randoms.padded:
        raise ValueError(f"simulation width {num_lanes} exceeds {randoms.padded} randoms")
    n = g.n
    labels = np.repeat(np.arange(n, dtype=np.int32)[:, None], num_lanes, axis=1)
    stats = PropagateStats()
    if g.m == 0:
        return (labels, stats) if return_stats else labels
    X = randoms.values[:num_lanes]
    hashes = table.hashes
    thr = slot_thresholds(g)
    all_dests = np.flatnonzero(g.degrees > 0).astype(np.int64)
    dense_cells = int(g.m) * num_lanes

    t0 = int(thr[0]) if len(thr) else 0
    uniform = bool((thr == t0).all())
    # the index sweep's work tracks the expected live pair count, a push
    # sweep's tracks push_cells, a dense sweep's is fixed at dense_cells
    exp_pairs = (g.m // 2) * num_lanes * (t0 / float(1 << 31))
    index_ok = uniform and exp_pairs * _SPARSE_FACTOR <= dense_cells
    thr_push = t0 if uniform else thr

    if index_ok:
        changed = None if t0 == 0 else _index_sweep(
            g, hashes, t0, X, labels, num_lanes, True)
        stats.modes.append("index")
    else:
        changed = _dense_sweep(g, hashes, thr, X, labels, all_dests, True, n_threads)
        stats.modes.append("dense")
    stats.sweeps += 1
    stats.changed_pairs.append(0 if changed is None else len(changed[0]))
    if return_stats:
        stats.label_sums.append(int(labels.sum(dtype=np.int64)))
    while changed is not None:
        rows, lanes = changed
        push_cells = int(g.degrees[rows.astype(np.int64)].sum())
        if index_ok and 2 * exp_pairs <= push_cells:
            changed = _index_sweep(g, hashes, t0, X, labels, num_lanes, False)
            stats.modes.append("index")
        elif push_cells * _SPARSE_FACTOR <= dense_cells:
            changed = _sparse_sweep(g, hashes, thr_push, X, labels, rows, lanes,
                                    n_threads)
            stats.modes.append("sparse")
        else:
            changed = _dense_sweep(g, hashes, thr, X, labels, all_dests, False, n_threads)
            stats.modes.append("dense")
        stats.sweeps += 1
        stats.changed_pairs.append(0 if changed is None else len(changed[0]))
        if return_stats:
            stats.label_sums.append(int(labels.sum(dtype=np.int64)))
    return (labels, stats) if return_stats else labels


def lane_label_step(g: Graph, u: int, v: int, r0: int, labels: np.ndarray,
                    table: EdgeHashTable, randoms: SimulationRandoms,
                    thresholds: np.ndarray | None = None) -> bool:
    """One push of edge (u, v) for the LANE_WIDTH simulations starting at r0.

    Lane b updates labels[v, r0 + b] to min(l_u, l_v) when the edge is in
    sample r0 + b and that min is smaller; u's labels are never touched.
    Returns whether any lane changed.  ``thresholds`` takes precomputed
    symmetrized slot thresholds to avoid rebuilding them per call.
    """
    if r0 % LANE_WIDTH or r0 + LANE_WIDTH > labels.shape[1]:
        raise ValueError(f"batch start {r0} invalid for width {labels.shape[1]}")
    slot = g.slot(u, v)
    if thresholds is None:
        thresholds = slot_thresholds(g)
    member = (randoms.values[r0 : r0 + LANE_WIDTH] ^ np.int32(table.hashes[slot])) \
        < thresholds[slot]
    lu = labels[u, r0 : r0 + LANE_WIDTH]
    lv = labels[v, r0 : r0 + LANE_WIDTH]
    new = np.where(member & (lu < lv), lu, lv)
    chg = bool((new != lv).any())
    labels[v, r0 : r0 + LANE_WIDTH] = new
    return chg


def component_sizes(labels: np.ndarray) -> np.ndarray:
    """sizes[l, r] = number of vertices labelled l in lane r, shape (n, R)."""
    n, num_lanes = labels.shape
    by_lane = np.ascontiguousarray(labels.T)
    sizes = np.empty((num_lanes, n), dtype=np.int32)
    for r in range(num_lanes):
        sizes[r] = np.bincount(by_lane[r], minlength=n)
    return np.ascontiguousarray(sizes.T)


def initial_marginal_gains(labels: np.ndarray, sizes: np.ndarray,
                           num_scored: int | None = None) -> np.ndarray:
    """Sum over scored lanes of the vertex's component size (integer units).

    Dividing by R is deferred to reporting; argmax decisions are unaffected.
    Padded surplus lanes beyond ``num_scored`` are ignored.
    """
    num_scored = labels.shape[1] if num_scored is None else int(num_scored)
    cols = np.arange(num_scored)
    return sizes[labels[:, :num_scored], cols].sum(axis=1, dtype=np.int64)


def component_sizes_and_gains(labels: np.ndarray, num_scored: int | None = None):
    """One-pass equivalent of component_sizes + initial_marginal_gains.

    Shares the lane-major transpose between the histogram and the gain
    gather instead of building it twice; returns (sizes, gains).
    """
    n, num_lanes = labels.shape
    num_scored = num_lanes if num_scored is None else int(num_scored)
    by_lane = np.ascontiguousarray(labels.T)
    sizes_t = np.empty((num_lanes, n), dtype=np.int32)
    # the per-vertex sum is at most n * num_scored, so accumulate narrow
    # when that fits and widen once at the end
    narrow = n * num_scored < (1 << 31)
    gains = np.zeros(n, dtype=np.int32 if narrow else np.int64)
    for r in range(num_lanes):
        counts = np.bincount(by_lane[r], minlength=n)
        sizes_t[r] = counts
        if r < num_scored:
            gains += sizes_t[r][by_lane[r]]
    return sizes_t.T, gains.astype(np.int64, copy=False)


def dump_labels(labels: np.ndarray, path) -> None:
    """Binary debug dump: little-endian u64 n, R, then row-major int32 labels."""
    with open(path, "wb") as fh:
        fh.write(np.array(labels.shape, dtype="<u8").tobytes())
        fh.write(labels.astype("<i4").tobytes())


def load_labels(path) -> np.ndarray:
    with open(path, "rb") as fh:
        n, r = np.frombuffer(fh.read(16), "<u8")
        return np.frombuffer(fh.read(), "<i4").reshape(int(n), int(r)).astype(np.int32)
