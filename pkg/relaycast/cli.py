"""Command-line entry points: analytic, simulate, validate, sweep.

Exit statuses: 0 success, 3 parse error, 4 validation error, 5 a validate
check failed, 6 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import logging
import sys
from contextlib import contextmanager
from typing import Iterator, Optional, Sequence, TextIO

from utils.settings import Settings, get_settings

from .csv_output import write_rows
from .errors import RelaycastError, ScenarioValidationError, ValidationFailed
from .models import ResultRow, SweepRow
from .service import EvaluationService

logger = logging.getLogger(__name__)

EXIT_OK = 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaycast",
        description="Recovery probabilities for carousel and systematic RLNC broadcast via drone clusters.",
    )
    parser.add_argument("--log-level", default=None, help="logging level (default RELAYCAST_LOG_LEVEL)")
    commands = parser.add_subparsers(dest="command", required=True)

    analytic = commands.add_parser("analytic", help="closed-form values as CSV")
    analytic.add_argument("--scenario", required=True)
    analytic.add_argument("--out", default=None, help="output path (default stdout)")

    simulate = commands.add_parser("simulate", help="Monte Carlo estimates as CSV")
    simulate.add_argument("--scenario", required=True)
    simulate.add_argument("--out", default=None)
    simulate.add_argument("--trials", type=int, default=None)
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--workers", type=int, default=None)

    validate = commands.add_parser("validate", help="check analytic values against simulation")
    validate.add_argument("--scenario", required=True)
    validate.add_argument("--out", default=None, help="report path (default stdout)")
    validate.add_argument("--trials", type=int, default=None)
    validate.add_argument("--seed", type=int, default=None)
    validate.add_argument("--sigmas", type=float, default=None)
    validate.add_argument("--workers", type=int, default=None)

    sweep = commands.add_parser("sweep", help="parameter grid or minimum-n_T search as CSV")
    sweep.add_argument("--sweep", required=True)
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--row-cap", type=int, default=None)
    sweep.add_argument("--workers", type=int, default=None)
    return parser


def _pick(flag: Optional[float], from_file: Optional[float], default: float) -> float:
    if flag is not None:
        return flag
    if from_file is not None:
        return from_file
    return default


@contextmanager
def _output(path: Optional[str]) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as handle:
        yield handle


def _positive(name: str, value: float) -> None:
    if value <= 0:
        raise ScenarioValidationError(f"{name}: must be > 0, got {value}")


def cmd_analytic(args: argparse.Namespace, service: EvaluationService, settings: Settings) -> int:
    _, scenarios, metrics = service.load_scenarios(args.scenario)
    rows = service.analytic_rows(scenarios, metrics)
    with _output(args.out) as stream:
        write_rows(rows, ResultRow, stream)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, service: EvaluationService, settings: Settings) -> int:
    document, scenarios, metrics = service.load_scenarios(args.scenario)
    trials = int(_pick(args.trials, document.trials, settings.TRIALS))
    seed = int(_pick(args.seed, document.seed, settings.SEED))
    _positive("trials", trials)
    rows = service.simulate_rows(scenarios, metrics, trials, seed, args.workers)
    with _output(args.out) as stream:
        write_rows(rows, ResultRow, stream)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, service: EvaluationService, settings: Settings) -> int:
    document, scenarios, metrics = service.load_scenarios(args.scenario)
    trials = int(_pick(args.trials, document.trials, settings.TRIALS))
    seed = int(_pick(args.seed, document.seed, settings.SEED))
    sigmas = float(_pick(args.sigmas, None, settings.SIGMAS))
    _positive("trials", trials)
    _positive("sigmas", sigmas)
    report = service.validate(scenarios, metrics, trials, seed, sigmas, args.workers)
    with _output(args.out) as stream:
        for line in report.lines():
            stream.write(line + "\n")
    if not report.passed:
        raise ValidationFailed(f"{len(report.failures)} of {len(report.checks)} checks failed")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, service: EvaluationService, settings: Settings) -> int:
    document = service.load_sweep(args.sweep)
    row_cap = int(_pick(args.row_cap, None, settings.ROW_CAP))
    _positive("row_cap", row_cap)
    rows = service.sweep_rows(document, row_cap, args.workers)
    with _output(args.out) as stream:
        write_rows(rows, SweepRow, stream)
    return EXIT_OK


COMMANDS = {
    "analytic": cmd_analytic,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    settings = get_settings()
    args = build_parser().parse_args(list(argv) if argv is not None else None)
    logging.basicConfig(
        level=(args.log_level or settings.LOG_LEVEL).upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if getattr(args, "workers", None) is not None and args.workers < 1:
        print("error: workers: must be >= 1", file=sys.stderr)
        return ScenarioValidationError.exit_code
    service = EvaluationService(settings)
    logger.debug("running %s", args.command)
    try:
        return COMMANDS[args.command](args, service, settings)
    except RelaycastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
