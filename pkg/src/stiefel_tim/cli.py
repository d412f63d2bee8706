"""Command-line front end: ``solve``, ``sweep``, ``check`` and ``bench``.

Results go to stdout or into the ``--out`` directory; logs go to stderr.
Exit codes: 0 success, 1 input or configuration error, 2 rank search exhausted,
every sweep trial failed, or a check suite failed.
"""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from enum import Enum
from pathlib import Path
from typing import Any, NoReturn, TypeVar

import numpy as np

from . import __version__, constants
from .config import Settings, get_settings
from .enums import AcceptanceRule, CheckSuite, SolverName
from .exceptions import ConfigurationError, DimensionError, InputError, RankSearchExhaustedError
from .logging import log_event, logger, setup_logging
from .models.network import NetworkInstance
from .models.options import SolverOptions
from .models.sweep import SweepConfig


E = TypeVar("E", bound=Enum)


class _ArgumentParser(argparse.ArgumentParser):
    """Raise ``InputError`` on usage errors instead of exiting with status 2."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise InputError(message)


def _values(enum: type[Enum]) -> list[str]:
    return [member.value for member in enum]


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subparser per command."""
    parser = _ArgumentParser(
        prog="stiefel-tim",
        description="DoF maximization for topological transmitter cooperation via Riemannian optimization",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    solve = sub.add_parser("solve", help="Find the smallest feasible rank of one topology")
    solve.add_argument("--topology", required=True, type=Path, help="Network instance JSON file")
    solve.add_argument("--solver", choices=_values(SolverName), help="Fixed-rank solver")
    solve.add_argument("--restarts", type=int, help="Random restarts per rank")
    solve.add_argument("--seed", type=int, help="Base seed (default: STIEFEL_TIM_SEED or 0)")
    solve.add_argument("--opts", type=Path, help="Solver options JSON file")
    solve.add_argument("--max-rank", type=int, help="Largest rank to try (default: N)")
    solve.add_argument(
        "--acceptance",
        choices=_values(AcceptanceRule),
        default=AcceptanceRule.RESIDUAL.value,
        help="Rank acceptance rule",
    )
    solve.add_argument("--warm-start", action="store_true", help="Start each rank from the previous solution")
    solve.add_argument("--beamformers", action="store_true", help="Also write beamformers.npz (needs --out)")
    solve.add_argument("--jobs", type=int, help="Threads for concurrent restarts")
    solve.add_argument("--out", type=Path, help="Output directory (default: print JSON to stdout)")

    sweep = sub.add_parser("sweep", help="Run a parameter sweep over random topologies")
    sweep.add_argument("--config", required=True, type=Path, help="Sweep config JSON file")
    sweep.add_argument(
        "--solver",
        choices=_values(SolverName),
        action="append",
        help="Solver to compare (repeatable; overrides the config)",
    )
    sweep.add_argument("--seed", type=int, help="Base seed (default: config seed, then STIEFEL_TIM_SEED)")
    sweep.add_argument("--jobs", type=int, help="Worker processes (default: all cores)")
    sweep.add_argument("--opts", type=Path, help="Solver options JSON file")
    sweep.add_argument("--timing", action="store_true", help="Record wall-clock seconds per trial")
    sweep.add_argument("--out", required=True, type=Path, help="Output directory")

    check = sub.add_parser("check", help="Run the numerical self-check suites")
    check.add_argument("--seed", type=int, help="Base seed")
    check.add_argument(
        "--suite",
        choices=_values(CheckSuite),
        action="append",
        help="Suite to run (repeatable; default: all)",
    )
    check.add_argument("--cases", type=int, default=20, help="Random cases per suite")
    check.add_argument("--out", type=Path, help="Also write checks.json here")

    bench = sub.add_parser("bench", help="Time per-iteration ingredients and compare solver convergence")
    bench.add_argument("--topology", required=True, type=Path, help="Network instance JSON file")
    bench.add_argument("--rank", required=True, type=int, help="Fixed rank r")
    bench.add_argument("--repeats", type=int, default=10, help="Timed calls per ingredient")
    bench.add_argument("--seed", type=int, help="Base seed")
    bench.add_argument("--opts", type=Path, help="Solver options JSON file")
    bench.add_argument(
        "--solver",
        choices=_values(SolverName),
        action="append",
        help="Solvers to compare (repeatable; default: all)",
    )
    bench.add_argument("--out", type=Path, help="Output directory")
    return parser


def _members(enum: type[E], raw: list[str] | None) -> list[E] | None:
    return [enum(value) for value in raw] if raw else None


def _positive(name: str, value: int | None) -> None:
    if value is not None and value < 1:
        msg = f"--{name} must be ≥ 1, got {value}"
        raise InputError(msg)


def _seed(args: argparse.Namespace, settings: Settings) -> int:
    seed = settings.seed if args.seed is None else int(args.seed)
    if seed < 0:
        msg = f"--seed must be ≥ 0, got {seed}"
        raise InputError(msg)
    return seed


def _options(args: argparse.Namespace) -> SolverOptions:
    return SolverOptions.from_file(args.opts) if args.opts else SolverOptions()


def _emit(payload: dict[str, Any], out: Path | None, filename: str) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=True)
    if out is None:
        sys.stdout.write(text + "\n")
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / filename).write_text(text + "\n", encoding="utf-8")


def cmd_solve(args: argparse.Namespace, settings: Settings) -> int:
    """Run the rank search on one topology file."""
    from .rank_search import extract_beamformers, minimize_rank  # noqa: PLC0415

    _positive("restarts", args.restarts)
    _positive("max-rank", args.max_rank)
    _positive("jobs", args.jobs)
    if args.beamformers and args.out is None:
        msg = "--beamformers needs --out"
        raise InputError(msg)
    inst = NetworkInstance.from_file(args.topology)
    opts = _options(args)
    try:
        result = minimize_rank(
            inst,
            SolverName(args.solver) if args.solver else settings.solver,
            opts,
            args.restarts or settings.restarts,
            _seed(args, settings),
            acceptance=AcceptanceRule(args.acceptance),
            residual_tol=settings.residual_tol,
            max_rank=args.max_rank,
            warm_start=args.warm_start,
            jobs=args.jobs or 1,
        )
    except RankSearchExhaustedError as e:
        _emit({"error": str(e), "per_rank": e.per_rank}, args.out, constants.RESULT_FILE)
        return constants.EXIT_SEARCH_FAILED

    _emit(result.to_json_dict(), args.out, constants.RESULT_FILE)
    if args.beamformers:
        bf = extract_beamformers(result.X, inst, result.rank)
        np.savez(args.out / constants.BEAMFORMERS_FILE, **bf.to_npz_arrays())
    return constants.EXIT_OK


def cmd_sweep(args: argparse.Namespace, settings: Settings) -> int:
    """Run a sweep and write the CSV table and JSON summary."""
    from .experiments import run_sweep, write_sweep_csv, write_sweep_summary  # noqa: PLC0415

    _positive("jobs", args.jobs)
    cfg = SweepConfig.from_file(
        args.config,
        defaults={"seed": settings.seed},
        seed=args.seed,
        solvers=_members(SolverName, args.solver),
        record_timing=True if args.timing else None,
    )
    result = run_sweep(cfg, _options(args), args.jobs or settings.workers)
    args.out.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(result, args.out / constants.SWEEP_CSV_FILE)
    write_sweep_summary(result, args.out / constants.SWEEP_SUMMARY_FILE)
    if result.all_failed:
        log_event(logging.ERROR, "Every sweep trial failed", "sweep_trial_failed", rows=len(result.rows))
        return constants.EXIT_SEARCH_FAILED
    return constants.EXIT_OK


def cmd_check(args: argparse.Namespace, settings: Settings) -> int:
    """Run the self-check suites and print one line per suite."""
    from .checks import run_checks  # noqa: PLC0415

    _positive("cases", args.cases)
    results = run_checks(_seed(args, settings), _members(CheckSuite, args.suite), args.cases)
    for result in results:
        sys.stdout.write(result.line() + "\n")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        payload = "[" + ",".join(r.model_dump_json() for r in results) + "]"
        (args.out / constants.CHECKS_FILE).write_text(payload + "\n", encoding="utf-8")
    return constants.EXIT_OK if all(r.passed for r in results) else constants.EXIT_CHECKS_FAILED


def cmd_bench(args: argparse.Namespace, settings: Settings) -> int:
    """Time the ingredients and compare solvers at a fixed rank."""
    from .bench import bench_ingredients  # noqa: PLC0415
    from .experiments import compare_convergence  # noqa: PLC0415

    _positive("rank", args.rank)
    _positive("repeats", args.repeats)
    inst = NetworkInstance.from_file(args.topology)
    seed = _seed(args, settings)
    timings = bench_ingredients(inst, args.rank, args.repeats, seed)
    solvers = _members(SolverName, args.solver) or list(SolverName)
    reports = compare_convergence(inst, args.rank, solvers, seed, _options(args))
    payload = {
        "ingredients": timings.model_dump(mode="json"),
        "convergence": {solver.value: report.summary() for solver, report in reports.items()},
    }
    _emit(payload, args.out, constants.BENCH_FILE)
    return constants.EXIT_OK


_COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "check": cmd_check, "bench": cmd_bench}


def run(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, configure logging and dispatch.

    Args:
        argv: Arguments without the program name (default: ``sys.argv[1:]``)

    Returns:
        Process exit code
    """
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # --help and --version
        return int(e.code or 0)
    except InputError as e:
        sys.stderr.write(f"stiefel-tim: error: {e}\n")
        return constants.EXIT_INPUT_ERROR

    try:
        settings = get_settings()
        setup_logging(settings.log_level, settings.log_format)
        return _COMMANDS[args.command](args, settings)
    except (InputError, ConfigurationError, DimensionError) as e:
        logger.error("Invalid input: %s", e, extra={"event": "input_error"})  # noqa: TRY400
        sys.stderr.write(f"stiefel-tim: error: {e}\n")
        return constants.EXIT_INPUT_ERROR
    except KeyboardInterrupt:
        return constants.EXIT_INTERRUPTED


def main() -> None:
    """Console script entry point."""
    sys.exit(run())
