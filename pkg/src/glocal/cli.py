"""Command-line entry point: ``glocal {compute,lcc,convert,bench,verify}``.

Exit codes: 0 success, 1 usage, 2 input/I-O error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import sys
from pathlib import Path

from . import harness, io_formats, pipeline
from .components import largest_connected_component
from .errors import ConvergenceError, InputError
from .graph_core import build
from .invariants import DEFAULT_K, ComputeConfig
from .random_graphs import erdos_renyi

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("glocal")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_graph_input(p):
    p.add_argument("--input", required=True, help="graph file")
    p.add_argument("--format", default="auto", choices=["auto", *io_formats.GRAPH_FORMATS],
                   help="input format (default: by extension, .mtx = matrixmarket)")
    p.add_argument("--threshold", type=float, default=0.0,
                   help="keep an edge iff its summed weight exceeds this (default 0)")


def _add_compute_flags(p, default_k=DEFAULT_K):
    p.add_argument("--invariants", default="deg,ss1,nl3,cc,lp",
                   help="comma-separated subset of deg,ss1,nl3,cc,lp")
    p.add_argument("--eigs", type=int, default=default_k, dest="K", help="eigenpairs K")
    p.add_argument("--lp-dim", type=int, default=None, help="latent position dimension (default min(K, 100))")
    p.add_argument("--scale-mode", default="scaled", choices=["scaled", "eigenvector"])
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=None, help="matvec budget (default 20K+100)")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="glocal", description="Glocal invariants of large sparse graphs.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("compute", help="compute invariants and write one file per invariant")
    _add_graph_input(p)
    _add_compute_flags(p)
    p.add_argument("--lcc", action="store_true", help="restrict to the largest connected component")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--output-format", default="csv", choices=list(io_formats.VECTOR_FORMATS))
    p.add_argument("--combined", action="store_true",
                   help="also write invariants.csv with all vector invariants as columns")

    p = sub.add_parser("lcc", help="extract the largest connected component")
    _add_graph_input(p)
    p.add_argument("--out", required=True, help="edge list output path")
    p.add_argument("--map", default=None, help="vertex map output (default <out>.vertex_map.csv)")

    p = sub.add_parser("convert", help="convert vectors (csv<->glcv) or graphs (edgelist<->matrixmarket)")
    p.add_argument("--input", required=True)
    p.add_argument("--from", dest="src_fmt", required=True,
                   choices=[*io_formats.VECTOR_FORMATS, *io_formats.GRAPH_FORMATS])
    p.add_argument("--to", dest="dst_fmt", required=True,
                   choices=[*io_formats.VECTOR_FORMATS, *io_formats.GRAPH_FORMATS])
    p.add_argument("--out", required=True)
    p.add_argument("--name", default=None, help="CSV column name (default: output file stem)")
    p.add_argument("--dtype", default=None, choices=["float64", "uint64"], help="GLCV payload type")

    p = sub.add_parser("bench", help="time chained vs independent computation")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="graph file")
    src.add_argument("--er", nargs=2, metavar=("N", "P"), help="generate G(N, P) instead")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", default="auto", choices=["auto", *io_formats.GRAPH_FORMATS])
    p.add_argument("--threshold", type=float, default=0.0)
    _add_compute_flags(p, default_k=50)
    p.add_argument("--json", default=None, help="also write the report as JSON here")

    p = sub.add_parser("verify", help="compare production invariants with brute-force oracles")
    _add_graph_input(p)
    return parser


def _graph_format(args) -> str:
    return io_formats.guess_graph_format(args.input) if args.format == "auto" else args.format


def _load_graph(args):
    edges = io_formats.read_graph(args.input, _graph_format(args))
    return build(edges, args.threshold)


def cmd_compute(args) -> int:
    config = pipeline.RunConfig(
        invariants=args.invariants,
        input_format=_graph_format(args),
        threshold=args.threshold,
        lcc=args.lcc,
        K=args.K,
        lp_dim=args.lp_dim,
        scale_mode=args.scale_mode,
        tol=args.tol,
        max_iter=args.max_iter,
        output_format=args.output_format,
    )
    result = pipeline.compute_to_dir(args.input, config, args.out)
    if args.combined:
        with open(Path(args.out) / "invariants.csv", "wb") as fh:
            io_formats.write_invariants_csv(result.bundle, fh)
    log.info("wrote %d files to %s", len(result.files), args.out)
    return EXIT_OK


def cmd_lcc(args) -> int:
    g = _load_graph(args)
    sub, vertex_map = largest_connected_component(g)
    with open(args.out, "wb") as fh:
        io_formats.write_edge_list(sub, fh)
    map_path = args.map or f"{args.out}.vertex_map.csv"
    with open(map_path, "wb") as fh:
        buf = io.StringIO()
        buf.write("vertex,original\n")
        for new, old in enumerate(vertex_map):
            buf.write(f"{new},{old}\n")
        fh.write(buf.getvalue().encode("utf-8"))
    print(f"lcc: {sub.n} of {g.n} vertices, {sub.m} of {g.m} edges")
    return EXIT_OK


def cmd_convert(args) -> int:
    with open(args.input, "rb") as fh:
        payload = fh.read()
    name = args.name or Path(args.out).stem
    out = io_formats.convert_bytes(payload, args.src_fmt, args.dst_fmt, name=name, dtype=args.dtype)
    with open(args.out, "wb") as fh:
        fh.write(out)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.er:
        g = erdos_renyi(int(args.er[0]), float(args.er[1]), seed=args.seed)
    else:
        g = _load_graph(args)
    config = ComputeConfig(which=tuple(s for s in args.invariants.split(",") if s),
                           K=args.K, lp_dim=args.lp_dim, scale_mode=args.scale_mode,
                           tol=args.tol, max_iter=args.max_iter)
    try:
        report = harness.bench(g, config)
    except harness.ModeMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(harness.format_bench(report))
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _load_graph(args)
    report = harness.verify(g)
    print(harness.format_verify(report))
    return EXIT_OK if report["ok"] else EXIT_NUMERIC


COMMANDS = {
    "compute": cmd_compute,
    "lcc": cmd_lcc,
    "convert": cmd_convert,
    "bench": cmd_bench,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConvergenceError as exc:
        print(f"error: convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InputError as exc:
        print(f"error: input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: i/o: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
