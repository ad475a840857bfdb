"""Command-line front end: load -> weight -> hash -> propagate -> select ->
evaluate -> report.

Exit codes: 1 usage, 2 I/O (unreadable/malformed files), 3 constraint
violations (k > n, parameters out of range, graph too large for `exact`).
All results go to stdout and are byte-identical for identical arguments,
seed, and threads=1; timing lines go to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from .evaluation import (evaluate_seeds, format_benchmark_table, run_benchmark,
                         sampling_cdf, write_benchmark_csv, write_cdf_tsv)
from .graph import (ConstraintError, FromFile, GraphFormatError, apply_weights,
                    load_graph, parse_weight_scheme)
from .hashing import SimulationRandoms, build_hash_table
from .oracles import HashSampler, exact_influence, mix_greedy, new_greedy, reachability
from .pipeline import run_fused


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; usage errors are 1
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _weights_arg(text: str):
    try:
        return parse_weight_scheme(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _default_threads() -> int:
    env = os.environ.get("INFMAX_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="infmax",
                     description="Influence maximization on undirected graphs "
                                 "under the independent cascade model.")
    sub = parser.add_subparsers(dest="command", required=True)
    threads_default = _default_threads()

    def add_common(p, with_r=True):
        p.add_argument("--graph", required=True,
                       help="edge-list file (u v [w] per line) or CSR cache")
        p.add_argument("--weights", type=_weights_arg, default="wc",
                       metavar="{const:P|uniform:LO,HI|normal:MEAN,STD|wc|file}",
                       help="edge-probability scheme (default: wc)")
        p.add_argument("--seed", type=int, default=0,
                       help="master random seed (default: 0)")
        if with_r:
            p.add_argument("--r", type=int, default=256,
                           help="number of Monte-Carlo simulations (default: 256)")

    p_select = sub.add_parser("select", help="pick k seed vertices")
    add_common(p_select)
    p_select.add_argument("--k", type=int, required=True, help="seeds to select")
    p_select.add_argument("--threads", type=int, default=threads_default,
                          help="propagation worker threads (default: cpu count, "
                               "or the INFMAX_THREADS environment variable)")
    p_select.add_argument("--algo", choices=("infuser", "newgreedy", "mixgreedy"),
                          default="infuser",
                          help="selection algorithm (default: infuser)")
    p_select.add_argument("--out", help="also write seeds to this file, one "
                                        "original vertex id per line")

    p_eval = sub.add_parser("evaluate", help="score an existing seed set")
    add_common(p_eval, with_r=False)
    p_eval.add_argument("--seeds-file", required=True,
                        help="file with one original vertex id per line")
    p_eval.add_argument("--r-eval", type=int, default=10_000,
                        help="evaluation worlds (default: 10000)")

    p_cdf = sub.add_parser("cdf", help="hash sampling-probability distribution")
    add_common(p_cdf)
    p_cdf.add_argument("--bins", type=int, default=100,
                       help="histogram bins (default: 100)")
    p_cdf.add_argument("--out", help="write the (bin_upper, cdf) TSV here")

    p_bench = sub.add_parser("bench", help="run benchmark rows from a config")
    p_bench.add_argument("--config", required=True,
                         help="INI file: [defaults] plus one section per row")
    p_bench.add_argument("--out", default="bench_results.csv",
                         help="CSV output path (default: bench_results.csv)")

    p_exact = sub.add_parser("exact",
                             help="exact expected influence (tiny graphs)")
    add_common(p_exact, with_r=False)
    p_exact.add_argument("--seeds-file", required=True,
                         help="file with one original vertex id per line")
    return parser


def _load_weighted(args):
    g = load_graph(args.graph)
    return apply_weights(g, args.weights)


def _read_seeds(path, g):
    """Seed file of original ids -> compact indices."""
    try:
        text = open(path, "r", encoding="utf-8").read()
    except OSError as exc:
        raise GraphFormatError(f"cannot open {path}: {exc}") from exc
    wanted = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            wanted.append(int(line))
        except ValueError:
            raise GraphFormatError(
                f"{path}: line {lineno}: not a vertex id: {line!r}") from None
    if not wanted:
        raise GraphFormatError(f"{path}: no seed ids")
    lookup = {int(orig): i for i, orig in enumerate(g.orig_ids)}
    missing = [s for s in wanted if s not in lookup]
    if missing:
        raise ConstraintError(f"seed ids not in graph: {missing[:5]}")
    return [lookup[s] for s in wanted]


def _cmd_select(args) -> int:
    g = _load_weighted(args)
    t0 = time.perf_counter()
    if args.algo == "infuser":
        run = run_fused(g, args.k, num_simulations=args.r,
                        master_seed=args.seed, n_threads=args.threads)
        seeds, sigma_sum, scored = run.seeds, run.selection.sigma, run.selection.num_scored
    else:
        table = build_hash_table(g)
        if args.algo == "mixgreedy":
            sampler = HashSampler(g, table, SimulationRandoms(args.r, args.seed))
            seeds = mix_greedy(g, args.k, args.r, sampler)
            worlds = range(args.r)
        else:
            sampler = HashSampler(
                g, table, SimulationRandoms((args.k + 1) * args.r, args.seed))
            seeds, _ = new_greedy(g, args.k, args.r, sampler)
            worlds = range(args.k * args.r, (args.k + 1) * args.r)
        sigma_sum = sum(len(reachability(sampler.sample(r), seeds)) for r in worlds)
        scored = args.r
    elapsed = time.perf_counter() - t0
    originals = [int(g.orig_ids[s]) for s in seeds]
    print(f"k: {len(seeds)}")
    print(f"r: {scored}")
    print("seeds: " + " ".join(str(s) for s in originals))
    print(f"spread: {sigma_sum / scored:.6f}")
    print(f"[timing] select: {elapsed:.3f}s", file=sys.stderr)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(str(s) for s in originals) + "\n")
    return 0


def _cmd_evaluate(args) -> int:
    g = _load_weighted(args)
    seeds = _read_seeds(args.seeds_file, g)
    t0 = time.perf_counter()
    mean, se = evaluate_seeds(g, seeds, args.r_eval, args.seed)
    print(f"spread: {mean:.6f}")
    print(f"se: {se:.6f}")
    print(f"[timing] evaluate: {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    return 0


def _cmd_cdf(args) -> int:
    g = _load_weighted(args)
    table = build_hash_table(g)
    randoms = SimulationRandoms(args.r, args.seed)
    result = sampling_cdf(g, table, randoms, bins=args.bins)
    print(f"values: {result.num_values}")
    print(f"ks: {result.ks_distance:.6f}")
    print(f"uniform_ok: {'true' if result.uniform_ok else 'false'}")
    if args.out:
        write_cdf_tsv(result, args.out)
    else:
        for upper, c in zip(result.bin_uppers, result.cdf):
            print(f"{upper:.6f}\t{c:.8f}")
    return 0


def _cmd_bench(args) -> int:
    rows = run_benchmark(args.config)
    write_benchmark_csv(rows, args.out)
    print(format_benchmark_table(rows))
    print(f"[csv] {args.out}", file=sys.stderr)
    return 0


def _cmd_exact(args) -> int:
    g = _load_weighted(args)
    seeds = _read_seeds(args.seeds_file, g)
    print(f"exact_spread: {exact_influence(g, seeds):.10f}")
    return 0


_COMMANDS = {
    "select": _cmd_select,
    "evaluate": _cmd_evaluate,
    "cdf": _cmd_cdf,
    "bench": _cmd_bench,
    "exact": _cmd_exact,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except GraphFormatError as exc:
        print(f"infmax: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"infmax: {exc}", file=sys.stderr)
        return 2
    except (ConstraintError, ValueError) as exc:
        print(f"infmax: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
