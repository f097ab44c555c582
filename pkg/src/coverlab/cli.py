"""Command-line entry point: ``coverlab verify``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for a bad
configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from .config import RunConfig, default_config, load_config
from .plane import ConfigurationError
from .report import build_report, dumps, matrix_dump
from .tower import run_pipeline

log = logging.getLogger("coverlab")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coverlab", description="Exact verification of a Z_2^3 cover tower.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run every check of the construction")
    src = v.add_mutually_exclusive_group(required=True)
    src.add_argument("--default", action="store_true", help="use the built-in configuration")
    src.add_argument("--config", metavar="PATH", help="TOML configuration file")
    v.add_argument("--report", metavar="PATH", help="write the JSON report here")
    v.add_argument("--dump-matrix", metavar="PATH", help="write the exact evaluation matrix here")
    v.add_argument("--timing", action="store_true", help="add per-check timings to the report")
    v.add_argument("--verbose", "-v", action="store_true")
    return p


def _summary(report, out) -> None:
    for c in report.checks:
        mark = "PASS" if c.passed else "FAIL"
        line = f"[{mark}] {c.key} ({c.stage})"
        if not c.passed:
            line += f": {c.message}"
        print(line, file=out)
    if report.failed_stage and not any(not c.passed for c in report.checks):
        print(f"[FAIL] {report.failed_stage}: {report.error}", file=out)
    h = report.headline
    if h is not None:
        print(f"headline: p_g={h['p_g']} q={h['q']} K^2={h['K2']} d={h['d']}", file=out)
    print("result: " + ("all checks passed" if report.passed else f"failed at {report.failed_stage}"), file=out)


def _write(path: str, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text, encoding="utf-8")


def verify(cfg: RunConfig, timing: bool = False, out=None) -> int:
    out = out or sys.stdout
    report = run_pipeline(cfg, timing=timing)
    _summary(report, out)
    if cfg.report:
        _write(cfg.report, dumps(build_report(report, include_timing=timing)))
        log.info("report written to %s", cfg.report)
    if cfg.dump_matrix:
        if report.evaluation is None:
            print("matrix not written: the run stopped before the evaluation matrix", file=sys.stderr)
        else:
            _write(cfg.dump_matrix, json.dumps(matrix_dump(report), sort_keys=True, indent=2) + "\n")
            log.info("matrix written to %s", cfg.dump_matrix)
    return EXIT_OK if report.passed else EXIT_FAILED


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = default_config() if args.default else load_config(args.config)
        changes = {}
        if args.report:
            changes["report"] = args.report
        if args.dump_matrix:
            changes["dump_matrix"] = args.dump_matrix
        if args.verbose:
            changes["verbose"] = True
        cfg = cfg.with_options(**changes)
        return verify(cfg, timing=args.timing)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
