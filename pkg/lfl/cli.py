"""
Command-line front end.

    lfl gen-metric --config run.json
    lfl check identity|exactness|integral|remark --config run.json
    lfl exponent --config run.json
    lfl optimize --config run.json --seed 7
    lfl convergence --config run.json
    lfl report merge a.json b.json --out summary.json

Exit codes: 0 pass, 2 tolerance failure, 3 configuration error,
4 numerical error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from lfl import __version__
from lfl.config import settings
from lfl.exceptions import ConfigError, FormConstructionError, LFLError, NotPositiveError, NumericalError
from lfl.models.reports import FailureReport
from lfl.models.run_config import RunConfig, SeededFourierSource
from lfl.services.run_service import CHECKS, RunService, report_merge, write_json_report

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_TOLERANCE = 2
EXIT_CONFIG = 3
EXIT_NUMERICAL = 4


def load_config(args: argparse.Namespace) -> RunConfig:
    """Read the JSON config (or defaults) and apply --seed / --size / --out."""
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config {args.config}: {e}") from e
        config = RunConfig.model_validate_json(text)
    else:
        config = RunConfig()

    data = config.model_dump(mode="json")
    if args.size is not None:
        data["model"]["sizes"] = [args.size] * (2 * data["model"]["n"] + 1)
    if args.seed is not None:
        data["seed"] = args.seed
        if isinstance(config.metric, SeededFourierSource):
            data["metric"]["seed"] = args.seed
    if args.out is not None:
        data["output_dir"] = args.out
    return RunConfig.model_validate(data)


def exit_code_for(error: Exception) -> int:
    if isinstance(error, (NumericalError, FormConstructionError, NotPositiveError)):
        return EXIT_NUMERICAL
    return EXIT_CONFIG


def fail(error: Exception, out: Optional[str]) -> int:
    """Write the failure report to stdout and, when possible, the output directory."""
    code = exit_code_for(error)
    report = FailureReport(exit_code=code, error_type=type(error).__name__, message=str(error))
    logger.error(f"{report.error_type}: {report.message}")
    try:
        write_json_report(report, Path(out or settings.OUTPUT_DIR) / "failure.json")
    except OSError as e:
        logger.error(f"Could not write failure report: {e}")
    print(report.model_dump_json(indent=2))
    return code


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", "-c", help="Run configuration (JSON)")
    parser.add_argument("--seed", type=int, default=None, help="Override the metric / optimizer seed")
    parser.add_argument("--size", type=int, default=None, help="Override every axis size")
    parser.add_argument("--out", "-o", default=None, help="Output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lfl",
        description="Levi-flat laboratory: Diederich-Fornaess index experiments on foliated models",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # --- gen-metric ---
    gen_parser = subparsers.add_parser("gen-metric", help="Write a seeded band-limited metric (LFLD1)")
    _add_run_options(gen_parser)

    # --- check ---
    check_parser = subparsers.add_parser("check", help="Run one verification check")
    check_parser.add_argument("check", choices=CHECKS, help="Check to run")
    _add_run_options(check_parser)

    # --- exponent ---
    exponent_parser = subparsers.add_parser("exponent", help="Diederich-Fornaess exponent of the configured metric")
    _add_run_options(exponent_parser)

    # --- optimize ---
    optimize_parser = subparsers.add_parser("optimize", help="Search Fourier metrics for the largest exponent")
    _add_run_options(optimize_parser)

    # --- convergence ---
    convergence_parser = subparsers.add_parser("convergence", help="Residuals under grid refinement")
    _add_run_options(convergence_parser)

    # --- report merge ---
    report_parser = subparsers.add_parser("report", help="Report utilities")
    report_sub = report_parser.add_subparsers(dest="report_command")
    merge_parser = report_sub.add_parser("merge", help="Merge JSON reports; pass is the conjunction")
    merge_parser.add_argument("reports", nargs="+", help="Command report files")
    merge_parser.add_argument("--out", "-o", default=None, help="Merged report path")
    return parser


def run(args: argparse.Namespace) -> int:
    if args.command == "report":
        merged = report_merge(args.reports, args.out)
        print(merged.model_dump_json(by_alias=True, indent=2))
        return EXIT_PASS if merged.passed else EXIT_TOLERANCE

    service = RunService(load_config(args))
    if args.command == "gen-metric":
        path = service.gen_metric()
        print(str(path))
        return EXIT_PASS

    command = args.check if args.command == "check" else args.command
    report = service.run(command)
    print(report.model_dump_json(by_alias=True, indent=2, exclude={"elapsed_seconds"}))
    return EXIT_PASS if report.passed else EXIT_TOLERANCE


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None or (args.command == "report" and args.report_command is None):
        parser.print_help()
        return EXIT_CONFIG

    try:
        return run(args)
    except (LFLError, ValidationError) as e:
        return fail(e, getattr(args, "out", None))


if __name__ == "__main__":
    sys.exit(main())
