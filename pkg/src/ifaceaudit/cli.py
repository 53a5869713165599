"""Command-line entry point.

Exit codes: 0 clean, 1 a ``--fail-on`` threshold was exceeded, 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from pathlib import Path

from .detect import FilterConfig
from .facts import dumps
from .model import ModelError, build_model
from .parser import EncodingError, MalformedFile, parse_source, read_source_dir
from .report import AnalysisResult, InputError, render, run_analysis

SYSTEM_GATES = ("rsdm", "rsum", "rsnum", "rreim")
INTERFACE_GATES = ("rum", "rdm")
EXIT_CLEAN, EXIT_FINDINGS, EXIT_ERROR = 0, 1, 2


def _gate(text: str) -> tuple[str, float]:
    metric, sep, value = text.partition(":")
    metric = metric.strip().lower()
    if not sep or metric not in SYSTEM_GATES + INTERFACE_GATES:
        raise argparse.ArgumentTypeError(
            f"expected metric:threshold with metric in {', '.join(SYSTEM_GATES + INTERFACE_GATES)}"
        )
    try:
        threshold = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"threshold {value!r} is not a number") from None
    if not 0.0 <= threshold <= 1.0:
        raise argparse.ArgumentTypeError("threshold must lie in [0, 1]")
    return metric, threshold


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifaceaudit",
        description="Detect duplicate and unused interface methods and report cohesion metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="analyze a source tree or a facts file")
    src = analyze.add_mutually_exclusive_group(required=True)
    src.add_argument("--source", metavar="DIR", help="directory of .java files")
    src.add_argument("--facts", metavar="FILE", help="facts file (JSON lines)")
    analyze.add_argument("--format", choices=("text", "csv", "machine"), default="text")
    analyze.add_argument("--out", metavar="FILE", help="write the report here instead of stdout")
    analyze.add_argument("--no-exclude-tests", action="store_true", help="keep test types")
    analyze.add_argument(
        "--include-markers", action="store_true", help="keep interfaces that declare no methods"
    )
    analyze.add_argument(
        "--min-impl",
        type=int,
        default=1,
        metavar="N",
        help="interfaces with fewer implementations are exempt from the unused analysis",
    )
    analyze.add_argument(
        "--library-mode",
        action="store_true",
        help="word unused findings as possible external API",
    )
    analyze.add_argument(
        "--correlation", choices=("pearson", "spearman", "both"), default="both"
    )
    analyze.add_argument(
        "--fail-on",
        type=_gate,
        action="append",
        default=[],
        metavar="METRIC:THRESHOLD",
        help="exit 1 when the metric exceeds the threshold (repeatable)",
    )
    analyze.add_argument("--top", type=int, default=20, help="rows in the text worst-offenders table")

    facts = sub.add_parser("facts", help="extract a facts file from a source tree")
    facts.add_argument("--source", metavar="DIR", required=True)
    facts.add_argument("--out", metavar="FILE")
    return parser


def exceeded_gates(result: AnalysisResult, gates: Sequence[tuple[str, float]]) -> list[str]:
    """Human-readable descriptions of every gate the result exceeds."""
    hits = []
    for metric, threshold in gates:
        if metric in SYSTEM_GATES:
            value = getattr(result.system, metric)
            if value > threshold:
                hits.append(f"{metric} = {value:.4f} > {threshold}")
        else:
            for m in result.interfaces:
                value = getattr(m, metric)
                if value is not None and value > threshold:
                    hits.append(f"{metric}({m.interface.qualified}) = {value:.4f} > {threshold}")
    return hits


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _cmd_analyze(args: argparse.Namespace) -> int:
    config = FilterConfig(
        exclude_tests=not args.no_exclude_tests,
        exclude_markers=not args.include_markers,
        min_implementations=args.min_impl,
        treat_as_library=args.library_mode,
    )
    result = run_analysis(source=args.source, facts=args.facts, config=config)
    _write(render(result, args.format, args.correlation, args.top), args.out)
    hits = exceeded_gates(result, args.fail_on)
    for h in hits:
        print(f"threshold exceeded: {h}", file=sys.stderr)
    return EXIT_FINDINGS if hits else EXIT_CLEAN


def _cmd_facts(args: argparse.Namespace) -> int:
    root = Path(args.source)
    if not root.is_dir():
        raise InputError(f"source directory not found: {root}")
    parsed = parse_source(read_source_dir(root))
    for d in parsed.diagnostics:
        print(f"{d.path}:{d.line}: {d.severity}: {d.message}", file=sys.stderr)
    model = build_model(parsed.interfaces, parsed.classes, parsed.calls, parsed.system_loc)
    _write(dumps(model), args.out)
    return EXIT_CLEAN


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for usage errors
        return EXIT_CLEAN if exc.code == 0 else EXIT_ERROR
    if getattr(args, "min_impl", 0) < 0:
        parser.print_usage(sys.stderr)
        print("ifaceaudit: error: --min-impl must be >= 0", file=sys.stderr)
        return EXIT_ERROR
    handler = _cmd_analyze if args.command == "analyze" else _cmd_facts
    try:
        return handler(args)
    except (InputError, MalformedFile, EncodingError, ModelError, OSError) as exc:
        print(f"ifaceaudit: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
