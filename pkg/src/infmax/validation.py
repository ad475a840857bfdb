"""Input-validation helpers shared by the estimator and the CLI."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .graph import ConstraintError, Graph, load_graph


def as_graph(X) -> Graph:
    """Coerce estimator input into a Graph.

    Accepts a Graph, a path to an edge list or CSR cache, or an array-like of
    shape (k, 2) or (k, 3) listing undirected edges (with optional weights);
    array vertex ids are compacted by first appearance like the file loader.
    """
    if isinstance(X, Graph):
        return X
    if isinstance(X, (str, Path)):
        return load_graph(X)
    arr = np.asarray(X)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3) or arr.shape[0] == 0:
        raise ValueError(
            "X must be a Graph, a graph file path, or a non-empty (k, 2|3) edge array")
    ids: dict[int, int] = {}
    us, vs, ws = [], [], []
    seen = set()
    for row in arr:
        a, b = int(row[0]), int(row[1])
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
        ws.append(float(row[2]) if arr.shape[1] == 3 else 1.0)
    if not us:
        raise ValueError("edge array contains no usable edges")
    orig = np.empty(len(ids), dtype=np.int64)
    for original, compact in ids.items():
        orig[compact] = original
    return Graph.from_edges(len(ids), np.column_stack([us, vs]),
                            np.asarray(ws), orig)


def check_graph(g: Graph) -> Graph:
    """Cheap structural invariants: offsets, symmetry, weight range."""
    if g.xadj[0] != 0 or g.xadj[-1] != g.m or (np.diff(g.xadj) < 0).any():
        raise ValueError("corrupt CSR offsets")
    g.reciprocal_slots  # raises GraphFormatError if not symmetric
    if g.m and (g.weights.min() < 0.0 or g.weights.max() > 1.0):
        raise ConstraintError("weights must lie in [0, 1]")
    return g


def check_num_seeds(k: int, n: int) -> int:
    k = int(k)
    if k < 1:
        raise ConstraintError(f"need at least one seed, got k={k}")
    if k > n:
        raise ConstraintError(f"k={k} exceeds vertex count n={n}")
    return k


def check_simulations(r: int) -> int:
    r = int(r)
    if r < 1:
        raise ConstraintError(f"simulation count must be positive, got {r}")
    return r
