"""Command-line entry point: gen, oracle, simulate, bench.

Exit codes: 0 ok, 2 usage or input error, 3 disconnected input, 4 verdict differs
from the oracle, 5 timeout.  Data goes to stdout as JSON, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import bench
from .graph import GenError, GenSpec, Graph, GraphError, emit_edge_list, generate_with_cut, is_connected, parse_edge_list, stats
from .oracle import has_cut_at_most, vertex_connectivity
from .sim import SimError

EXIT_OK, EXIT_USAGE, EXIT_DISCONNECTED, EXIT_MISMATCH, EXIT_TIMEOUT = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _read_graph(path: str) -> Graph:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read {path}: {exc.strerror}") from exc
    try:
        return parse_edge_list(text)
    except GraphError as exc:
        raise CliError(EXIT_USAGE, f"{path}: {exc}") from exc


def _need_connected(g: Graph, path: str) -> None:
    if not is_connected(g):
        raise CliError(EXIT_DISCONNECTED, f"{path}: graph is disconnected; the problem needs a connected network")


def _check_kappa(g: Graph, kappa: int) -> None:
    if g.n < 3 or not 1 <= kappa <= g.n - 2:
        raise CliError(EXIT_USAGE, f"kappa must lie in [1, n-2] with n >= 3; got kappa={kappa}, n={g.n}")


# ---------------------------------------------------------------- commands

def cmd_gen(args) -> int:
    fam = bench.FAMILY_ALIASES.get(args.family, args.family)
    spec = GenSpec(family=fam, n=args.n, p=args.p, a=args.a, k=args.k, b=args.b, density=args.density,
                   side_degree=args.side_degree, connected=args.connected, exact=args.exact, seed=args.seed)
    try:
        g, planted = generate_with_cut(spec)
    except GenError as exc:
        raise CliError(EXIT_USAGE, f"invalid parameters: {exc}") from exc
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(emit_edge_list(g))
    out = stats(g).as_dict()
    out["graph"] = spec.descriptor()
    if planted is not None:
        out["planted_cut"] = planted
    if (args.exact or args.connectivity) and g.n >= 2 and is_connected(g):
        out["connectivity"] = vertex_connectivity(g).connectivity
    _emit(out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = _read_graph(args.file)
    _need_connected(g, args.file)
    _check_kappa(g, args.kappa)
    res = has_cut_at_most(g, args.kappa)
    _emit({"verdict": res.kind, "cut": list(res.vertices), "kappa": args.kappa, "connectivity_leq": res.is_cut})
    return EXIT_OK


def cmd_simulate(args) -> int:
    g = _read_graph(args.file)
    _need_connected(g, args.file)
    _check_kappa(g, args.kappa)
    if args.algo == "kappa1" and args.kappa != 1:
        raise CliError(EXIT_USAGE, "--algo kappa1 decides kappa = 1 only")
    st = stats(g)
    try:
        mr = args.max_rounds if args.max_rounds is not None else bench.max_rounds_for(g.n, st.diameter, args.kappa, args.algo, g.m)
    except bench.CorpusError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    if mr < 1:
        raise CliError(EXIT_USAGE, "--max-rounds must be >= 1")
    out = bench.run_one(g, args.kappa, args.seed, args.algo, mr)
    oracle = has_cut_at_most(g, args.kappa)
    rec = bench.record_for(g, st, args.file, "file", args.kappa, args.seed, args.algo, out, oracle)
    _emit(rec.to_dict())
    if rec.verdict == "timeout":
        return EXIT_TIMEOUT
    return EXIT_OK if rec.match else EXIT_MISMATCH


def cmd_bench(args) -> int:
    try:
        with open(args.corpus) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise CliError(EXIT_USAGE, f"cannot read {args.corpus}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_USAGE, f"{args.corpus}: invalid JSON: {exc}") from exc
    try:
        instances, meta = bench.load_corpus(doc)
    except (bench.CorpusError, GenError) as exc:
        raise CliError(EXIT_USAGE, f"{args.corpus}: {exc}") from exc
    seeds = args.seeds if args.seeds is not None else int(meta.get("seeds", 1))
    base = args.base_seed if args.base_seed is not None else int(meta.get("base_seed", 0))
    algos = args.algo or meta.get("algos") or ["main"]
    for a in algos:
        if a not in bench.ALGOS:
            raise CliError(EXIT_USAGE, f"unknown algo {a!r}")
    try:
        report = bench.run_bench(instances, seeds, base, algos, stream=args.stream, jobs=args.jobs)
    except (bench.CorpusError, GenError) as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.dumps() + "\n")
        _emit(report.summary)
    else:
        sys.stdout.write(report.dumps() + "\n")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vcut", description="CONGEST vertex-cut simulator and benchmarks")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate a graph")
    g.add_argument("--family", required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--p", type=float)
    g.add_argument("--a", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--b", type=int)
    g.add_argument("--density", type=float)
    g.add_argument("--side-degree", type=int)
    g.add_argument("--connected", action="store_true", help="gnp: redraw until connected")
    g.add_argument("--exact", action="store_true", help="planted: redraw until connectivity equals k")
    g.add_argument("--connectivity", action="store_true", help="report the oracle connectivity")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="edge-list output path")
    g.set_defaults(func=cmd_gen)

    o = sub.add_parser("oracle", help="exact sequential cut query")
    o.add_argument("file")
    o.add_argument("--kappa", type=int, required=True)
    o.set_defaults(func=cmd_oracle)

    s = sub.add_parser("simulate", help="run one distributed algorithm")
    s.add_argument("file")
    s.add_argument("--kappa", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--algo", choices=bench.ALGOS, default="main")
    s.add_argument("--max-rounds", type=int)
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bench", help="run a corpus over seeds")
    b.add_argument("--corpus", required=True)
    b.add_argument("--seeds", type=int)
    b.add_argument("--base-seed", type=int)
    b.add_argument("--algo", action="append", choices=bench.ALGOS)
    b.add_argument("--out", help="write the full report here and print only the summary")
    b.add_argument("--stream", help="JSON-lines record stream; existing records are reused")
    b.add_argument("--jobs", type=int, default=1)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"vcut {args.cmd}: {exc}", file=sys.stderr)
        return exc.code
    except SimError as exc:
        print(f"vcut {args.cmd}: simulator error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
