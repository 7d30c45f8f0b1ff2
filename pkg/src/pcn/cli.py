"""Command line entry point: ``pcn scan``, ``pcn load-edges``, ``pcn analyze``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .extractor import CorpusNotFoundError, EmptyCorpusError, ExtractorConfig, build_pcn
from .io import GraphFormatError, load_edge_list, load_graph, save_graph
from .report import STAGES, AnalysisConfig, StageError, analyze, write_analysis

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EMPTY = 2
EXIT_NOT_CONVERGED = 3
EXIT_STAGE = 4

log = logging.getLogger("pcn")


def _csv_list(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in _csv_list(text))


def cmd_scan(args) -> int:
    try:
        config = ExtractorConfig(extensions=_csv_list(args.ext), scope=args.scope)
        g, report = build_pcn(args.root, config)
    except EmptyCorpusError as exc:
        print(f"pcn scan: empty corpus ({exc})", file=sys.stderr)
        return EXIT_EMPTY
    except (CorpusNotFoundError, ValueError) as exc:
        print(f"pcn scan: {exc}", file=sys.stderr)
        return EXIT_ERROR
    save_graph(g, args.out)
    report_path = Path(args.report) if args.report else Path(str(args.out) + ".json")
    summary = {"corpus": str(args.root), "config": {"ext": list(config.extensions), "scope": config.scope}}
    summary.update(report.to_dict())
    report_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(
        f"{report.files_scanned} files, N={g.n}, {g.n_edges} edges, {report.resolved_calls} resolved calls "
        f"({g.total_calls / g.n:.3f} per procedure), {sum(report.unresolved_calls.values())} unresolved"
    )
    return EXIT_OK


def cmd_load_edges(args) -> int:
    try:
        g = load_edge_list(args.file, args.format)
    except (OSError, GraphFormatError) as exc:
        print(f"pcn load-edges: {exc}", file=sys.stderr)
        return EXIT_ERROR
    save_graph(g, args.out)
    print(f"N={g.n}, {g.n_edges} edges, {g.total_calls} links")
    return EXIT_OK


def cmd_analyze(args) -> int:
    try:
        g = load_graph(args.file)
        config = AnalysisConfig(
            alpha=args.alpha,
            tol=args.tol,
            max_iter=args.max_iter,
            weighted=args.weighted,
            drop_self_loops=args.drop_self_loops,
            direction=args.direction,
            stages=_csv_list(args.stages),
            bins_per_decade=args.bins_per_decade,
            bin_width=args.bin_width,
            critical_fraction=args.critical_fraction,
            top=args.top,
            dense_limit=args.dense_limit,
            radii=_floats(args.radius),
            method=args.method,
            arnoldi_k=args.arnoldi_k,
        )
    except (OSError, ValueError) as exc:
        print(f"pcn analyze: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        analysis = analyze(g, config, corpus=str(args.file))
    except StageError as exc:
        print(f"pcn analyze: stage {exc.stage}: {exc.cause}", file=sys.stderr)
        return EXIT_STAGE
    write_analysis(analysis, args.out_dir)
    rep = analysis.report
    line = f"N={rep['n']}"
    if "correlation" in rep:
        line += f" kappa={rep['correlation']['kappa']:.6g}"
    if "spectrum" in rep:
        stats = ", ".join(f"|l|>{r}: {v:.4g}" for r, v in rep["spectrum"]["threshold_stats"].items())
        line += f" spectrum[{stats}]"
    print(line)
    if not analysis.converged:
        print("pcn analyze: PageRank did not converge; report flagged", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcn", description="Procedure call network analysis")
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="extract a call graph from a C source tree")
    p.add_argument("root")
    p.add_argument("--ext", default="c,h", help="comma-separated file extensions (default c,h)")
    p.add_argument("--scope", choices=("global", "file"), default="global")
    p.add_argument("--out", required=True, help="graph file to write")
    p.add_argument("--report", help="extraction report JSON (default <out>.json)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("load-edges", help="convert a directed edge list to a graph file")
    p.add_argument("file")
    p.add_argument("--format", choices=("plain", "named"), default="plain")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_load_edges)

    p = sub.add_parser("analyze", help="degree laws, rankings, correlator and spectrum")
    p.add_argument("file")
    p.add_argument("--alpha", type=float, default=0.85)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--weighted", action="store_true", help="weight links by call multiplicity")
    p.add_argument("--drop-self-loops", action="store_true")
    p.add_argument("--direction", choices=("forward", "reversed"), default="forward", help="links used for the spectrum")
    p.add_argument("--stages", default="degrees,rank,correlation", help=f"subset of {','.join(STAGES)}")
    p.add_argument("--bins-per-decade", type=int, default=5)
    p.add_argument("--bin-width", type=float, default=0.25, help="joint histogram cell width in decades")
    p.add_argument("--critical-fraction", type=float, default=0.01)
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--dense-limit", type=int, default=4000)
    p.add_argument("--radius", default="0.1", help="comma-separated modulus thresholds")
    p.add_argument("--method", choices=("dense", "arnoldi"), default="dense")
    p.add_argument("--arnoldi-k", type=int, default=200)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
