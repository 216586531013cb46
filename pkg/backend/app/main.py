"""
diffset toolkit - Command Line Interface
Subcommands verify, compute and search. Reports go to stdout as JSON
lines; logs and error payloads go to stderr.

Exit codes: 0 all assertions passed, 1 an assertion-grade row (or a
recomputed claim) failed, 2 invalid input.
"""
import argparse
import csv
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

from .core.exceptions import DiffsetError
from .core.logging import get_logger, setup_logging
from .core.settings import get_settings
from .core.utils import parse_float_range, parse_int_range
from .schemas.common import ErrorReport
from .schemas.compute import ComputeRequest
from .services.compute import QUANTITIES, compute
from .services.search import OBJECTIVES, hill_climb
from .services.suites import SUITES, SuiteOptions, get_suite
from .worker import SweepWorker

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(prog="diffset", description=settings.app_name)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default=None, help="Override DIFFSET_LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", parents=[common], help="Run a verification suite")
    verify.add_argument("suite", help=f"One of: {', '.join(SUITES)}")
    verify.add_argument("--q", help="Moduli, e.g. '11,13' or '2..100'")
    verify.add_argument("--density", help="Density, list or range 'lo..hi'")
    verify.add_argument("--samples", type=int, default=settings.verify.default_samples)
    verify.add_argument("--seed", type=int, default=settings.verify.default_seed)
    verify.add_argument("--exhaustive", action="store_true", help="Enumerate all subsets")
    verify.add_argument("--jobs", type=int, default=settings.jobs, help="Worker processes")
    verify.add_argument("--csv", type=Path, help="Also write rows to this CSV file")
    verify.add_argument("--timings", action="store_true", default=settings.verify.report_timings)
    verify.add_argument("--epsilon", type=float)
    verify.add_argument("--M", type=float)
    verify.add_argument("--k", type=int, default=2, help="Sets (covintersect) or frequencies (bohr)")

    comp = commands.add_parser("compute", parents=[common], help="Compute one quantity")
    comp.add_argument("quantity", help=f"One of: {', '.join(QUANTITIES)}")
    comp.add_argument("--q", type=int)
    comp.add_argument("--A")
    comp.add_argument("--B")
    comp.add_argument("--S")
    comp.add_argument("--kind", default="times")
    comp.add_argument("--lam", type=int, default=1)
    comp.add_argument("--r", type=int, default=1)
    comp.add_argument("--a", type=int, default=1)
    comp.add_argument("--gamma", default="", help="Comma-separated Bohr frequencies")
    comp.add_argument("--epsilon", type=float)
    comp.add_argument("--M", type=float)
    comp.add_argument("--mode", default="full", choices=("full", "units"))
    comp.add_argument("--form", default="product", choices=("product", "squarediff"))
    comp.add_argument("--set", dest="sets", action="append", default=[], help="Set literal; repeatable")
    comp.add_argument("--seed", type=int, default=0)
    comp.add_argument("--row", help="A verify row (JSON line) to recompute with quantity replay")

    search = commands.add_parser("search", parents=[common], help="Hill-climb for extremal instances")
    search.add_argument("objective", help=f"One of: {', '.join(OBJECTIVES)}")
    search.add_argument("--q", type=int, required=True)
    search.add_argument("--alpha", type=float, help="Density for max_covx")
    search.add_argument("--beta", type=float, help="Density for max_d")
    search.add_argument("--budget", type=int, default=settings.search.default_budget)
    search.add_argument("--seed", type=int, default=0)
    return parser


def _write_csv(path: Path, rows: list[dict]) -> None:
    columns: list[str] = []
    for row in rows:
        columns.extend(key for key in row if key not in columns)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)


def cmd_verify(args: argparse.Namespace, out: TextIO) -> int:
    suite = get_suite(args.suite)
    options = SuiteOptions(
        qs=tuple(parse_int_range(args.q)) if args.q else None,
        density=parse_float_range(args.density) if args.density else None,
        samples=args.samples,
        seed=args.seed,
        exhaustive=args.exhaustive,
        epsilon=args.epsilon,
        M=args.M,
        k=args.k,
    )
    tasks = suite.plan(options)
    worker = SweepWorker(jobs=args.jobs, timings=args.timings)

    failures = 0
    rows = []
    for report in worker.run(tasks):
        out.write(report.to_json_line() + "\n")
        if report.failed:
            failures += 1
            logger.bind(suite=report.suite, q=report.instance.get("q"), seed=report.seed).warning(
                f"Failed: {report.claim} on {report.instance}"
            )
        if args.csv:
            rows.append(report.csv_row())
    if args.csv:
        _write_csv(args.csv, rows)
    logger.info(f"{suite.name}: {len(tasks)} instances, {failures} failures")
    return EXIT_FAILED if failures else EXIT_OK


def cmd_compute(args: argparse.Namespace, out: TextIO) -> int:
    request = ComputeRequest(
        q=args.q,
        A=args.A,
        B=args.B,
        S=args.S,
        kind=args.kind,
        lam=args.lam,
        r=args.r,
        a=args.a,
        gamma=[int(g) for g in args.gamma.split(",") if g.strip()],
        epsilon=args.epsilon,
        M=args.M,
        mode=args.mode,
        form=args.form,
        sets=args.sets,
        seed=args.seed,
        row=args.row,
    )
    result = compute(args.quantity, request)
    out.write(result.to_json_line() + "\n")
    return EXIT_FAILED if result.passed is False else EXIT_OK


def cmd_search(args: argparse.Namespace, out: TextIO) -> int:
    density = args.alpha if args.objective == "max_covx" else args.beta
    if density is None:
        density = args.alpha or args.beta or 0.25
    result = hill_climb(args.objective, args.q, density, budget=args.budget, seed=args.seed)
    out.write(result.to_json_line() + "\n")
    return EXIT_OK if result.verified else EXIT_FAILED


COMMANDS = {"verify": cmd_verify, "compute": cmd_compute, "search": cmd_search}


def main(
    argv: Optional[Sequence[str]] = None,
    out: Optional[TextIO] = None,
    err: Optional[TextIO] = None,
) -> int:
    """
    CLI entry point.

    Args:
        argv: Arguments without the program name; defaults to sys.argv
        out: Report stream, stdout by default
        err: Error payload stream, stderr by default

    Returns:
        Exit code
    """
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    settings = get_settings()
    setup_logging(
        log_level=args.log_level or settings.log_level,
        log_file=settings.log_file,
        enable_json=settings.enable_json_logging,
    )
    try:
        return COMMANDS[args.command](args, out)
    except (DiffsetError, ValueError) as e:
        logger.debug(f"{args.command} rejected input: {e}")
        error = ErrorReport(error=type(e).__name__, message=str(e), detail={"command": args.command})
        err.write(error.model_dump_json() + "\n")
        return EXIT_ERROR


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
