"""Command-line pipeline: import, validate, evaluate, analyze, report, stats, serve.

Suite state lives in a working directory with fixed file names
(suite.jsonl, outputs/<system>.tsv, log.jsonl); pick it with --suite-dir
or the MTSUITE_DIR environment variable. Given identical files and log,
every command is deterministic.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import store
from .analysis import EmptyAnalysisError, SignificanceConfig, warning_stats
from .model import validate_suite
from .report import DEFAULT_MIN_N, GROUPINGS, compute_analysis, group_table, render
from .store import DECIDE_FAIL, DECIDE_PASS, FormatError, ReplayError, SuiteDir

ENV_SUITE_DIR = "MTSUITE_DIR"

FORMAT_EXT = {"md": "md", "markdown": "md", "tsv": "tsv", "records": "jsonl"}


def _suite_dir(args) -> SuiteDir:
    root = args.suite_dir or os.environ.get(ENV_SUITE_DIR) or "."
    return SuiteDir(root)


def cmd_import(args) -> int:
    workdir = _suite_dir(args)
    suite = store.import_suite(args.suite_file)
    report = validate_suite(suite.items, suite.taxonomy)
    for finding in report.findings:
        print(f"{finding.code}: {finding.message}", file=sys.stderr)
    if not report.ok:
        return 1
    workdir.root.mkdir(parents=True, exist_ok=True)
    workdir.suite_path.write_text(store.dump_suite(suite), "utf-8")
    print(f"imported {len(suite.items)} items -> {workdir.suite_path}")
    return 0


def cmd_validate(args) -> int:
    workdir = _suite_dir(args)
    suite = workdir.load_suite()
    report = validate_suite(suite.items, suite.taxonomy)
    for finding in report.findings:
        print(f"{finding.code}: {finding.message}")
    print(f"{len(suite.items)} items, {len(report.errors())} errors")
    return 0 if report.ok else 1


def cmd_evaluate(args) -> int:
    workdir = _suite_dir(args)
    suite = workdir.load_suite()
    imported = store.import_outputs(args.outputs_file, args.system, suite)
    workdir.outputs_dir.mkdir(parents=True, exist_ok=True)
    workdir.output_path(args.system).write_text(store.dump_outputs(imported.outputs), "utf-8")
    if imported.missing:
        print(f"{len(imported.missing)} items without output: "
              + ", ".join(imported.missing[:5])
              + ("..." if len(imported.missing) > 5 else ""))
    _, judgments = workdir.effective()
    judgment_set = judgments[args.system]
    counts = judgment_set.counts()
    print(
        f"{args.system}: {len(judgment_set)} pairs, "
        f"{counts['pass']} pass, {counts['fail']} fail, {counts['warning']} warning "
        f"(warning rate {100.0 * judgment_set.warning_rate():.1f}%)"
    )
    return 0


def _excluded(args) -> tuple[str, ...]:
    if not args.exclude:
        return ()
    return tuple(s for s in args.exclude.split(",") if s)


def cmd_analyze(args) -> int:
    workdir = _suite_dir(args)
    suite, judgments = workdir.effective()
    mode = f"analysis{args.mode}"
    analysis = compute_analysis(suite, judgments, mode, _excluded(args))
    print(f"{mode}: {len(analysis.systems)} systems")
    for system in analysis.systems:
        cells = [
            by_system[system]
            for by_system in analysis.cells_by_phenomenon.values()
            if system in by_system
        ]
        correct = sum(c.correct for c in cells)
        evaluated = sum(c.evaluated for c in cells)
        pct = f"{100.0 * correct / evaluated:.1f}%" if evaluated else "n/a"
        print(f"  {system}: {correct}/{evaluated} correct ({pct})")
    return 0


def cmd_report(args) -> int:
    workdir = _suite_dir(args)
    suite, judgments = workdir.effective()
    mode = f"analysis{args.mode}"
    analysis = compute_analysis(suite, judgments, mode, _excluded(args))
    table = group_table(analysis, args.grouping, min_n=args.min_n, config=SignificanceConfig())
    body = render(table, args.format)
    out_dir = Path(args.out) if args.out else workdir.reports_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{args.grouping}_{mode}"
    table_path = out_dir / f"{stem}.{FORMAT_EXT[args.format]}"
    table_path.write_text(body, "utf-8")
    print(f"wrote {table_path}")
    if not args.no_figures:
        from .figures import save_table_heatmap

        figure_path = save_table_heatmap(table, out_dir / f"{stem}.png")
        print(f"wrote {figure_path}")
    return 0


def cmd_stats(args) -> int:
    workdir = _suite_dir(args)
    base = workdir.base_judgments()
    _, effective = workdir.effective()
    decisions: dict[str, int] = {}
    for event in workdir.load_events():
        if event.kind in (DECIDE_PASS, DECIDE_FAIL):
            decisions[event.system] = decisions.get(event.system, 0) + 1
    stats = warning_stats(base, effective, decisions)
    for s in stats.systems:
        print(
            f"{s.system}: {s.pairs} pairs, warnings {s.warnings_before} -> {s.warnings_after} "
            f"({100.0 * s.rate_before:.1f}% -> {100.0 * s.rate_after:.1f}%), "
            f"{s.decided} human decisions"
        )
    print(f"human-validated outputs: {stats.validated_outputs}")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        lines = ["system\tpairs\twarnings_before\twarnings_after\tdecided"]
        lines += [
            f"{s.system}\t{s.pairs}\t{s.warnings_before}\t{s.warnings_after}\t{s.decided}"
            for s in stats.systems
        ]
        tsv_path = out_dir / "warning_stats.tsv"
        tsv_path.write_text("\n".join(lines) + "\n", "utf-8")
        print(f"wrote {tsv_path}")
        from .figures import save_warning_rates

        figure_path = save_warning_rates(stats, out_dir / "warning_stats.png")
        print(f"wrote {figure_path}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(_suite_dir(args).root)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mtsuite", description=__doc__)
    parser.add_argument("--suite-dir", default=None,
                        help=f"suite working directory (default: ${ENV_SUITE_DIR} or .)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("import", help="parse and validate a suite file into the working dir")
    p.add_argument("suite_file")
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("validate", help="validate the working dir suite")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("evaluate", help="ingest one system's outputs and judge them")
    p.add_argument("system")
    p.add_argument("outputs_file")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("analyze", help="per-system accuracy under analysis 1 or 2")
    p.add_argument("--mode", choices=("1", "2"), default="1")
    p.add_argument("--exclude", default="", help="comma-separated systems to exclude")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("report", help="write a report table (and figure) to disk")
    p.add_argument("--mode", choices=("1", "2"), default="1")
    p.add_argument("--grouping", choices=GROUPINGS, default="category")
    p.add_argument("--format", choices=("md", "tsv", "records"), default="md")
    p.add_argument("--min-n", type=int, default=DEFAULT_MIN_N)
    p.add_argument("--exclude", default="")
    p.add_argument("--out", default=None, help="output directory (default: <suite-dir>/reports)")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("stats", help="warning rates before/after triage")
    p.add_argument("--out", default=None, help="also write TSV and figure here")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the triage HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8437)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, ReplayError, EmptyAnalysisError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
