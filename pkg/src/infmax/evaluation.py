"""Seed-set evaluation, sampling-uniformity statistics, and benchmarking.

Evaluation always uses fresh rng-sampled worlds, never the hash family the
selector saw, so selection and evaluation randomness stay independent.
"""

from __future__ import annotations

import configparser
import csv
import math
import time
import tracemalloc
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import oracles
from .baseline import select_seeds_explicit
from .graph import (ConstraintError, Graph, apply_weights, generate_er,
                    generate_rmat, load_graph, parse_weight_scheme)
from .hashing import H_MAX, EdgeHashTable, SimulationRandoms, build_hash_table
from .pipeline import run_fused

# worlds per deterministic rng chunk; fixed so results never depend on the
# thread count, only on rng_seed
_WORLD_CHUNK = 4096

# tiny-graph fast path bounds (bitset-free vectorized closure)
_SMALL_N = 64
_SMALL_E = 64

_MAX_CDF_VALUES = 20_000_000

KS_UNIFORM_BOUND = 0.01


def _canonical_probs(g: Graph):
    canon = g.canonical_slots
    recip = g.reciprocal_slots[canon]
    probs = np.maximum(g.weights[canon], g.weights[recip])
    return g.sources[canon].astype(np.int64), g.adj[canon].astype(np.int64), probs


def _closure_counts_small(g, seeds, probs, cu, cv, num_worlds, rng):
    """Reached-set size per world, vectorized across worlds (tiny graphs)."""
    live = rng.random((num_worlds, len(probs))) < probs[None, :]
    reached = np.zeros((num_worlds, g.n), dtype=bool)
    reached[:, seeds] = True
    changed = True
    while changed:
        changed = False
        for e in range(len(probs)):
            m = live[:, e]
            ru = reached[:, cu[e]]
            rv = reached[:, cv[e]]
            nu = ru | (rv & m)
            nv = rv | (ru & m)
            if not np.array_equal(nu, ru):
                reached[:, cu[e]] = nu
                changed = True
            if not np.array_equal(nv, rv):
                reached[:, cv[e]] = nv
                changed = True
    return reached.sum(axis=1, dtype=np.int64)


def _closure_counts_general(g, seeds, probs, cu, cv, num_worlds, rng):
    """Reached-set size per world by union-find over live edges."""
    out = np.empty(num_worlds, dtype=np.int64)
    n = g.n
    cu_l = cu.tolist()
    cv_l = cv.tolist()
    for w in range(num_worlds):
        live = np.flatnonzero(rng.random(len(probs)) < probs)
        parent: dict[int, int] = {}
        size: dict[int, int] = {}

        def find(x: int) -> int:
            root = x
            while parent.get(root, root) != root:
                root = parent[root]
            while parent.get(x, x) != x:
                parent[x], x = root, parent[x]
            return root

        for e in live.tolist():
            a, b = find(cu_l[e]), find(cv_l[e])
            if a != b:
                if size.get(a, 1) < size.get(b, 1):
                    a, b = b, a
                parent[b] = a
                size[a] = size.get(a, 1) + size.get(b, 1)
        roots = {find(s) for s in seeds}
        out[w] = sum(size.get(r, 1) for r in roots)
    return out


def evaluate_seeds(g: Graph, seeds, r_eval: int, rng_seed: int = 0,
                   n_threads: int = 1) -> tuple[float, float]:
    """Mean and standard error of the reached-set size over ``r_eval`` fresh
    independently sampled worlds.

    Deterministic for a given rng_seed regardless of n_threads: worlds are
    generated in fixed-size chunks with rng streams spawned per chunk.
    """
    seeds = sorted({int(s) for s in seeds})
    if not seeds:
        raise ValueError("seed set must be nonempty")
    if any(not 0 <= s < g.n for s in seeds):
        raise ValueError("seed outside vertex range")
    r_eval = int(r_eval)
    if r_eval < 1:
        raise ValueError(f"r_eval must be >= 1, got {r_eval}")
    cu, cv, probs = _canonical_probs(g)
    small = g.n <= _SMALL_N and len(probs) <= _SMALL_E
    worker = _closure_counts_small if small else _closure_counts_general

    starts = list(range(0, r_eval, _WORLD_CHUNK))
    streams = np.random.SeedSequence(rng_seed).spawn(len(starts))

    def run_chunk(i: int) -> np.ndarray:
        count = min(_WORLD_CHUNK, r_eval - starts[i])
        return worker(g, seeds, probs, cu, cv, count,
                      np.random.default_rng(streams[i]))

    if n_threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            counts = np.concatenate(list(pool.map(run_chunk, range(len(starts)))))
    else:
        counts = np.concatenate([run_chunk(i) for i in range(len(starts))])
    mean = float(counts.mean())
    se = float(counts.std(ddof=1) / math.sqrt(r_eval)) if r_eval > 1 else 0.0
    return mean, se


# ---------------------------------------------------------------------------
# Sampling-uniformity statistics
# ---------------------------------------------------------------------------

@dataclass
class SamplingCdf:
    """Empirical CDF of hash sampling probabilities with its KS distance."""

    bin_uppers: np.ndarray
    cdf: np.ndarray
    ks_distance: float
    num_values: int

    @property
    def uniform_ok(self) -> bool:
        return self.ks_distance < KS_UNIFORM_BOUND


def sampling_cdf(g: Graph, table: EdgeHashTable, randoms: SimulationRandoms,
                 bins: int = 100) -> SamplingCdf:
    """Distribution of (X[r] ^ hash) / h_max over canonical slots and scored
    simulations: near-uniform for a well-behaved hash, and visibly not for a
    degenerate one.

    Large graphs are deterministically strided down to ~20M values so the
    exact KS statistic stays computable.
    """
    if bins < 10:
        raise ValueError(f"need at least 10 bins, got {bins}")
    canon = g.canonical_slots
    scored = randoms.num_scored
    stride = max(1, math.ceil(len(canon) * scored / _MAX_CDF_VALUES))
    hashes = table.hashes[canon[::stride]]
    values = (hashes[:, None] ^ randoms.values[None, :scored]).astype(np.float64)
    values = values.ravel()
    values /= H_MAX
    values.sort()
    n_vals = len(values)
    above = np.arange(1, n_vals + 1) / n_vals - values
    below = values - np.arange(0, n_vals) / n_vals
    ks = float(max(above.max(), below.max()))
    counts, _ = np.histogram(values, bins=bins, range=(0.0, 1.0))
    cdf = np.cumsum(counts) / n_vals
    uppers = np.arange(1, bins + 1) / bins
    return SamplingCdf(uppers, cdf, ks, n_vals)


def write_cdf_tsv(result: SamplingCdf, path) -> None:
    """Two-column TSV (bin_upper, cdf)."""
    with open(path, "w", encoding="utf-8") as fh:
        for upper, c in zip(result.bin_uppers, result.cdf):
            fh.write(f"{upper:.6f}\t{c:.8f}\n")


# ---------------------------------------------------------------------------
# Benchmark harness
# ---------------------------------------------------------------------------

@dataclass
class BenchRow:
    dataset: str
    algo: str
    k: int
    r: int
    threads: int
    seconds: float
    peak_bytes: int
    sigma: float
    sigma_se: float
    error: str = ""


def _load_dataset(spec: str) -> Graph:
    """A path, or an inline synthetic spec like er:n=1000,deg=8,seed=1 /
    rmat:scale=10,deg=8,seed=1."""
    kind, _, args = spec.partition(":")
    if kind in ("er", "rmat") and args:
        kv = dict(item.split("=") for item in args.split(","))
        if kind == "er":
            return generate_er(int(kv["n"]), float(kv.get("deg", 8)),
                               int(kv.get("seed", 0)))
        return generate_rmat(int(kv["scale"]), float(kv.get("deg", 8)),
                             int(kv.get("seed", 0)))
    return load_graph(spec)


def _run_algo(g: Graph, algo: str, k: int, r: int, threads: int, seed: int):
    """Returns (seeds, sigma_sum, num_scored) for one benchmark row."""
    if algo == "infuser":
        run = run_fused(g, k, num_simulations=r, master_seed=seed,
                        n_threads=threads)
        return run.seeds, run.selection.sigma, run.selection.num_scored
    if algo == "baseline":
        table = build_hash_table(g)
        randoms = SimulationRandoms(r, seed)
        res = select_seeds_explicit(g, table, randoms, k)
        return res.seeds, res.sigma, res.num_scored
    table = build_hash_table(g)
    if algo == "mixgreedy":
        sampler = oracles.HashSampler(g, table, SimulationRandoms(r, seed))
        seeds = oracles.mix_greedy(g, k, r, sampler)
        sigma = 0
        for rr in range(r):
            sigma += len(oracles.reachability(sampler.sample(rr), seeds))
        return seeds, sigma, r
    if algo == "newgreedy":
        sampler = oracles.HashSampler(g, table, SimulationRandoms((k + 1) * r, seed))
        seeds, _ = oracles.new_greedy(g, k, r, sampler)
        sigma = 0
        for rr in range(r):
            sigma += len(oracles.reachability(sampler.sample(k * r + rr), seeds))
        return seeds, sigma, r
    raise ValueError(f"unknown algo {algo!r}")


def parse_bench_config(path) -> list[dict]:
    """INI file: a [defaults] section plus one section per benchmark row."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConstraintError(f"cannot read benchmark config {path}")
    defaults = dict(parser["defaults"]) if parser.has_section("defaults") else {}
    rows = []
    for name in parser.sections():
        if name == "defaults":
            continue
        row = dict(defaults)
        row.update(parser[name])
        row.setdefault("name", name)
        if "dataset" not in row or "algo" not in row:
            raise ConstraintError(f"bench row [{name}] needs dataset and algo")
        rows.append(row)
    if not rows:
        raise ConstraintError(f"benchmark config {path} has no rows")
    return rows


def run_benchmark(config) -> list[BenchRow]:
    """Execute benchmark rows; a failing row is recorded, not fatal.

    ``config`` is an INI path or a pre-parsed list of row dicts.  Peak memory
    is the tracemalloc high-water mark over the algorithm run (Python
    allocator view, includes numpy buffers).  ``seconds`` covers weighting +
    hashing + selection, not dataset loading or evaluation.
    """
    rows = parse_bench_config(config) if not isinstance(config, list) else config
    out: list[BenchRow] = []
    for row in rows:
        dataset = row["dataset"]
        algo = row["algo"]
        k = int(row.get("k", 10))
        r = int(row.get("r", 256))
        threads = int(row.get("threads", 1))
        seed = int(row.get("seed", 0))
        r_eval = int(row.get("r_eval", 0))
        scheme = row.get("weights", "wc")
        try:
            g = _load_dataset(dataset)
            tracemalloc.start()
            tracemalloc.reset_peak()
            t0 = time.perf_counter()
            gw = apply_weights(g, parse_weight_scheme(scheme), rng_seed=seed)
            seeds, sigma_sum, scored = _run_algo(gw, algo, k, r, threads, seed)
            seconds = time.perf_counter() - t0
            peak = tracemalloc.get_traced_memory()[1]
            tracemalloc.stop()
            if r_eval > 0:
                sigma, sigma_se = evaluate_seeds(gw, seeds, r_eval, seed + 1,
                                                 n_threads=threads)
            else:
                sigma, sigma_se = sigma_sum / scored, float("nan")
            out.append(BenchRow(dataset, algo, k, r, threads, seconds, peak,
                                sigma, sigma_se))
        except Exception as exc:  # per-row failure policy
            if tracemalloc.is_tracing():
                tracemalloc.stop()
            out.append(BenchRow(dataset, algo, k, r, threads, float("nan"), 0,
                                float("nan"), float("nan"), str(exc)))
    return out


def write_benchmark_csv(rows: list[BenchRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dataset", "algo", "K", "R", "threads", "seconds",
                         "peak_bytes", "sigma", "sigma_se"])
        for row in rows:
            writer.writerow([row.dataset, row.algo, row.k, row.r, row.threads,
                             f"{row.seconds:.3f}", row.peak_bytes,
                             f"{row.sigma:.6f}", f"{row.sigma_se:.6f}"])


def format_benchmark_table(rows: list[BenchRow]) -> str:
    """Human-readable fixed-width table (peak memory via tracemalloc)."""
    header = (f"{'dataset':<28} {'algo':<10} {'K':>4} {'R':>5} {'thr':>3} "
              f"{'seconds':>9} {'peak_MB':>8} {'sigma':>12} {'se':>8}")
    lines = [header, "-" * len(header)]
    for row in rows:
        if row.error:
            lines.append(f"{row.dataset:<28} {row.algo:<10} {row.k:>4} "
                         f"{row.r:>5} {row.threads:>3} ERROR: {row.error}")
            continue
        lines.append(
            f"{row.dataset:<28} {row.algo:<10} {row.k:>4} {row.r:>5} "
            f"{row.threads:>3} {row.seconds:>9.3f} "
            f"{row.peak_bytes / 1e6:>8.1f} {row.sigma:>12.4f} {row.sigma_se:>8.4f}")
    return "\n".join(lines)
