"""Command-line interface: ``pearl {encode,verify,csl,count,gso-dump}``.

Exit codes: 0 success or all checks passed, 1 a check failed, 2 usage or
input error. ``PEARL_SEED`` sets the default ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .csl import csl_classify, csl_dataset
from .encoder import GnnConfig, InputDistribution, pearl_b, pearl_r
from .graph import GraphParseError, GsoDomainError, GsoKind, build_gso, read_graph
from .harness import cycle_count_oracle, triangle_estimator
from .suites import SUITES, random_config, run_suite

__all__ = ["main"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
GSO_DUMP_MAX_N = 32


class UsageError(Exception):
    pass


def _default_seed():
    raw = os.environ.get("PEARL_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"PEARL_SEED must be an integer, got {raw!r}") from None


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_config(path):
    try:
        return GnnConfig.from_json(Path(path).read_text())
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc


def _default_config(g, seed):
    # untrained 1 -> 8 -> 8 network, taps scaled to 1/8 against this graph's operator
    return random_config(np.random.default_rng(seed), (1, 8, 8), (5, 3), GsoKind.ADJACENCY, g)


def cmd_encode(args):
    if args.mode == "R" and args.M is None:
        raise UsageError("--mode R requires --M")
    if args.mode == "B" and args.M is not None:
        raise UsageError("--M only applies to --mode R")
    if args.M is not None and args.M < 1:
        raise UsageError("--M must be positive")
    g = read_graph(args.graph)
    cfg = _load_config(args.config) if args.config else _default_config(g, args.seed)
    t0 = time.perf_counter()
    if args.mode == "B":
        pe = pearl_b(g, cfg, args.threads)
    else:
        pe = pearl_r(g, cfg, InputDistribution(args.distribution, args.seed), args.M, args.threads)
    wall = time.perf_counter() - t0
    _write(pe.to_csv(), args.out)
    meta = pe.meta() | {"seed": args.seed if args.mode == "R" else pe.seed,
                        "wall_time_s": wall, "graph": str(args.graph),
                        "dropped_self_loops": g.dropped_self_loops}
    meta_path = args.meta or (f"{args.out}.meta.json" if args.out not in (None, "-") else None)
    if meta_path:
        Path(meta_path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_verify(args):
    report = run_suite(args.suite, seed=args.seed, n=args.n, threads=args.threads)
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n")
    if args.json:
        print(report.to_json())
    else:
        print(report.table())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_csl(args):
    if args.mode == "B" and args.M is not None:
        raise UsageError("--M only applies to --mode R")
    M = args.M if args.M is not None else 10_000
    res = csl_classify(csl_dataset(args.copies, args.seed), args.mode, M, args.seed,
                       threads=args.threads)
    text = res.csv() if args.emit == "csv" else res.table() + "\n"
    _write(text, args.out)
    if args.out not in (None, "-") or args.emit == "csv":
        print(f"accuracy {res.accuracy:.4f}", file=sys.stderr)
    ok = res.accuracy == 1.0 and res.separated
    return EXIT_OK if ok else EXIT_FAIL


def cmd_count(args):
    if args.estimator != "oracle" and args.k != 3:
        raise UsageError(f"the {args.estimator} estimator only counts triangles (k = 3)")
    g = read_graph(args.graph)
    if args.estimator == "oracle":
        counts, se = cycle_count_oracle(g, args.k), None
    elif args.estimator == "analytic":
        counts, se = triangle_estimator(g, mode="analytic"), None
    else:
        counts, se = triangle_estimator(g, args.M, args.seed, "monte_carlo", args.threads)
    head = "node,count" + (",stderr" if se is not None else "")
    rows = [head]
    for v, c in enumerate(counts):
        val = str(int(c)) if args.estimator == "oracle" else repr(float(c))
        rows.append(f"{v},{val}" + (f",{float(se[v])!r}" if se is not None else ""))
    _write("\n".join(rows) + "\n", args.out)
    return EXIT_OK


def cmd_gso_dump(args):
    g = read_graph(args.graph)
    if g.n_nodes > GSO_DUMP_MAX_N:
        raise UsageError(f"gso-dump is limited to N <= {GSO_DUMP_MAX_N}, got {g.n_nodes}")
    dense = build_gso(g, args.kind).toarray()
    if args.format == "json":
        text = json.dumps({"kind": GsoKind.parse(args.kind).value, "n": g.n_nodes,
                           "matrix": dense.tolist()}) + "\n"
    else:
        text = "\n".join(",".join(repr(float(x)) for x in row) for row in dense) + "\n"
    _write(text, args.out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser(default_seed=0):
    p = _Parser(prog="pearl", description="Graph positional encodings and property checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, threads=True):
        sp.add_argument("--seed", type=int, default=default_seed,
                        help="random seed (default: $PEARL_SEED or 0)")
        if threads:
            sp.add_argument("--threads", type=int, default=1,
                            help="worker threads; output does not depend on it")

    e = sub.add_parser("encode", help="write positional encodings as CSV")
    e.add_argument("--graph", required=True)
    e.add_argument("--config", help="GnnConfig JSON (default: seeded untrained 1-8-8 network)")
    e.add_argument("--mode", choices=["R", "B"], required=True, type=str.upper)
    e.add_argument("--M", type=int, help="number of random samples (mode R)")
    e.add_argument("--distribution", default="gaussian",
                   choices=["gaussian", "rademacher", "cubic"])
    e.add_argument("--out", help="CSV path (default: stdout)")
    e.add_argument("--meta", help="sidecar JSON path (default: <out>.meta.json)")
    common(e)
    e.set_defaults(func=cmd_encode)

    v = sub.add_parser("verify", help="run a property suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--n", type=int, help="graph-size knob of the suite")
    v.add_argument("--report", help="write the JSON report here")
    v.add_argument("--json", action="store_true", help="print JSON instead of a table")
    common(v)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("csl", help="training-free CSL classification")
    c.add_argument("--mode", choices=["R", "B"], default="B", type=str.upper)
    c.add_argument("--M", type=int, help="random samples per graph (mode R, default 10000)")
    c.add_argument("--copies", type=int, default=15, help="relabeled copies per class")
    c.add_argument("--emit", choices=["text", "csv"], default="text")
    c.add_argument("--out")
    common(c)
    c.set_defaults(func=cmd_csl)

    k = sub.add_parser("count", help="per-node cycle counts")
    k.add_argument("--graph", required=True)
    k.add_argument("--k", type=int, choices=range(3, 8), required=True, metavar="{3..7}")
    k.add_argument("--estimator", choices=["oracle", "analytic", "monte-carlo"], default="oracle")
    k.add_argument("--M", type=int, default=100_000)
    k.add_argument("--out")
    common(k)
    k.set_defaults(func=cmd_count)

    d = sub.add_parser("gso-dump", help="print a dense shift operator (N <= 32)")
    d.add_argument("--graph", required=True)
    d.add_argument("--kind", default="adjacency", type=GsoKind.parse,
                   help="adjacency, laplacian, normalized_adjacency, normalized_laplacian, random_walk")
    d.add_argument("--format", choices=["csv", "json"], default="csv")
    d.add_argument("--out")
    d.set_defaults(func=cmd_gso_dump)
    return p


def main(argv=None):
    try:
        seed = _default_seed()
    except UsageError as exc:
        print(f"pearl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    parser = build_parser(seed)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, GraphParseError, GsoDomainError, OSError, ValueError) as exc:
        print(f"pearl {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
