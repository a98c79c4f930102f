from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

from utils.settings import Settings, get_settings

from .adapters import (
    ScenarioFile,
    ScenarioFileAdapter,
    SweepFile,
    SweepFileAdapter,
    SweepPoint,
    load_json,
    parse_scenario,
    parse_sweep,
)
from .analytic import cluster_erasures, evaluate, min_transmissions, p_sr_partial_mix
from .errors import InfeasibleAtCapError, ResourceCapError
from .models import Metric, Provenance, ResultRow, Scenario, SweepRow, SystematicRlnc
from .simcore import estimate_many

logger = logging.getLogger(__name__)

AnalyticAdjust = Callable[[ResultRow], float]


@dataclass(frozen=True)
class Check:
    row: ResultRow
    tolerance: float
    passed: bool

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        label = _metric_label(self.row)
        return (
            f"{verdict} {label} n_T={self.row.n_T} "
            f"analytic={self.row.analytic_value:.6f} ({self.row.analytic_kind}) "
            f"sim={self.row.sim_value:.6f}±{self.row.sim_stderr:.6f} tol={self.tolerance:.6f}"
        )


@dataclass
class ValidationReport:
    checks: List[Check] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def failures(self) -> List[Check]:
        return [check for check in self.checks if not check.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def lines(self) -> List[str]:
        out = [check.line() for check in self.checks]
        out.extend(f"NOTE {note}" for note in self.notes)
        out.append(
            f"{len(self.checks) - len(self.failures)}/{len(self.checks)} checks passed"
        )
        return out


def _metric_label(row: ResultRow) -> str:
    if row.base_index is None:
        return row.metric
    if row.mu is None:
        return f"{row.metric}({row.base_index})"
    return f"{row.metric}({row.base_index},mu={row.mu})"


def _blank_row(scenario: Scenario, metric: Metric) -> ResultRow:
    return ResultRow(
        scheme=scenario.scheme.name,
        q=scenario.q,
        connectivity=scenario.connectivity.value,
        k=scenario.k,
        n_T=scenario.n_T,
        metric=metric.name,
        mu=metric.mu,
        base_index=metric.base,
    )


def _evaluate_point(point: SweepPoint, cap: int) -> SweepRow:
    scenario = point.scenario
    row = SweepRow(
        scheme=scenario.scheme.name,
        q=scenario.q,
        connectivity=scenario.connectivity.value,
        k=scenario.k,
        clusters=scenario.N,
        L=point.L,
        eps=point.eps,
        n_T=scenario.n_T,
        metric=point.metric.name if point.metric else "min_transmissions",
        mu=point.metric.mu if point.metric else None,
        base_index=point.metric.base if point.metric else None,
        target=point.target,
    )
    if point.metric is not None:
        result = evaluate(scenario, point.metric)
        row.analytic_value = result.value
        row.analytic_kind = result.kind.value
        return row
    try:
        n_T, result = min_transmissions(scenario, point.target, cap)
        row.n_T = n_T
        row.analytic_value = result.value
        row.analytic_kind = result.kind.value
    except InfeasibleAtCapError as exc:
        row.n_T = None
        row.analytic_value = exc.best
        row.notes = f"infeasible_at_cap={exc.cap}"
    return row


class EvaluationService:
    """Coordinates file loading, analytic evaluation, simulation and sweeps."""

    def __init__(self, settings: Settings | None = None) -> None:
        self._settings = settings or get_settings()
        self._scenario_adapter = ScenarioFileAdapter()
        self._sweep_adapter = SweepFileAdapter()

    def load_scenarios(
        self, path: Union[str, Path]
    ) -> Tuple[ScenarioFile, List[Scenario], List[Metric]]:
        document = parse_scenario(load_json(path))
        return (
            document,
            self._scenario_adapter.adapt(document),
            self._scenario_adapter.metrics(document),
        )

    def load_sweep(self, path: Union[str, Path]) -> SweepFile:
        return parse_sweep(load_json(path))

    def analytic_rows(
        self, scenarios: Sequence[Scenario], metrics: Sequence[Metric]
    ) -> List[ResultRow]:
        rows = []
        for scenario in scenarios:
            for metric in metrics:
                result = evaluate(scenario, metric)
                row = _blank_row(scenario, metric)
                row.analytic_value = result.value
                row.analytic_kind = result.kind.value
                rows.append(row)
        logger.info("analytic: %d rows", len(rows))
        return sorted(rows, key=ResultRow.sort_key)

    def simulate_rows(
        self,
        scenarios: Sequence[Scenario],
        metrics: Sequence[Metric],
        trials: int,
        seed: int,
        workers: Optional[int] = None,
    ) -> List[ResultRow]:
        rows = []
        for scenario in scenarios:
            estimates = estimate_many(scenario, metrics, trials, seed, workers)
            for metric in metrics:
                sim = estimates[metric]
                row = _blank_row(scenario, metric)
                row.sim_value = sim.estimate
                row.sim_stderr = sim.std_error
                row.trials = trials
                row.seed = seed
                rows.append(row)
            logger.debug("simulated n_T=%d (%d trials)", scenario.n_T, trials)
        logger.info("simulate: %d rows", len(rows))
        return sorted(rows, key=ResultRow.sort_key)

    def validate(
        self,
        scenarios: Sequence[Scenario],
        metrics: Sequence[Metric],
        trials: int,
        seed: int,
        sigmas: float,
        workers: Optional[int] = None,
        analytic_adjust: Optional[AnalyticAdjust] = None,
    ) -> ValidationReport:
        """Compare every analytic value with simulation.

        Exact values must agree within ``sigmas`` standard errors; lower bounds
        must not exceed the simulation by more than that. The standard error
        used is the larger of the simulated one and sqrt(a(1 - a)/trials).
        ``analytic_adjust`` replaces the analytic value (harness self-test).
        """
        if sigmas <= 0:
            raise ValueError(f"tolerance in sigmas must be > 0, got {sigmas}")
        report = ValidationReport()
        by_key = {
            (row.n_T, row.metric, row.base_index, row.mu): row
            for row in self.analytic_rows(scenarios, metrics)
        }
        for row in self.simulate_rows(scenarios, metrics, trials, seed, workers):
            analytic = by_key[(row.n_T, row.metric, row.base_index, row.mu)]
            row.analytic_value = analytic.analytic_value
            row.analytic_kind = analytic.analytic_kind
            if analytic_adjust is not None:
                row.analytic_value = analytic_adjust(row)

            a, s = row.analytic_value, row.sim_value
            sigma = max(row.sim_stderr, math.sqrt(max(a * (1.0 - a), 0.0) / trials))
            tolerance = sigmas * sigma
            if row.analytic_kind == Provenance.LOWER_BOUND.value:
                passed = s + tolerance >= a
            else:
                passed = abs(a - s) <= tolerance
            report.checks.append(Check(row=row, tolerance=tolerance, passed=passed))
        report.notes.extend(self._truncated_mixture_notes(scenarios, metrics, report))
        logger.info("validate: %d/%d passed", len(report.checks) - len(report.failures), len(report.checks))
        return report

    def _truncated_mixture_notes(
        self, scenarios: Sequence[Scenario], metrics: Sequence[Metric], report: ValidationReport
    ) -> List[str]:
        """Report where the n >= k mixture for partial RLNC recovery falls
        short of the full mixture used for the analytic column."""
        sims = {
            (c.row.n_T, c.row.base_index, c.row.mu): c.row.sim_value
            for c in report.checks
            if c.row.metric == Metric.BASE_PARTIAL
        }
        notes = []
        for scenario in scenarios:
            if not isinstance(scenario.scheme, SystematicRlnc):
                continue
            eps = cluster_erasures(scenario)
            for metric in metrics:
                if metric.name != Metric.BASE_PARTIAL or metric.mu >= scenario.k:
                    continue
                truncated = p_sr_partial_mix(
                    eps[metric.base - 1], metric.mu, scenario.k, scenario.n_T, scenario.scheme.q
                )
                total = evaluate(scenario, metric).value
                if total - truncated > 1e-12:
                    sim = sims.get((scenario.n_T, metric.base, metric.mu), float("nan"))
                    note = (
                        f"{metric.label} n_T={scenario.n_T}: mixture over n >= k gives "
                        f"{truncated:.6f}, over n >= mu {total:.6f}, simulation {sim:.6f}"
                    )
                    logger.warning(note)
                    notes.append(note)
        return notes

    def sweep_rows(
        self,
        document: SweepFile,
        row_cap: Optional[int] = None,
        workers: Optional[int] = None,
    ) -> List[SweepRow]:
        cap = row_cap if row_cap is not None else self._settings.ROW_CAP
        expected = self._sweep_adapter.count(document)
        if expected > cap:
            raise ResourceCapError(f"sweep grid has {expected} rows, above the cap of {cap}")
        points = self._sweep_adapter.adapt(document)
        search_cap = self._settings.MAX_TRANSMISSIONS
        pool_size = workers if workers is not None else self._settings.WORKERS
        logger.debug("sweep: %d points on %d workers", len(points), pool_size)

        if pool_size > 1 and len(points) > 1:
            with ProcessPoolExecutor(max_workers=pool_size) as executor:
                rows = list(executor.map(_evaluate_point, points, [search_cap] * len(points)))
        else:
            rows = [_evaluate_point(point, search_cap) for point in points]
        return sorted(rows, key=SweepRow.sort_key)
