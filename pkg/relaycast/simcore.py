"""Seedable Monte Carlo simulation of broadcast, relay and decoding.

Stream rule: trials are numbered 0..trials-1 and grouped into consecutive
blocks of TRIALS_PER_STREAM. Block ``b`` draws from
``default_rng(SeedSequence(seed, spawn_key=(b,)))`` and runs its trials in
order. Blocks are the unit of parallel work and their success counts are
summed, so the estimate does not depend on the number of workers.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from utils.settings import get_settings

from .analytic import mission_isolated
from .models import Connectivity, Metric, Scenario, SimEstimate, SystematicRlnc, TrialOutcome
from .strategies import strategy_for

logger = logging.getLogger(__name__)

TRIALS_PER_STREAM = 1024


def trial_stream(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def run_trial(scenario: Scenario, rng: np.random.Generator) -> TrialOutcome:
    """One broadcast of n_T packets to every drone, offload, and decode."""
    strategy = strategy_for(scenario.scheme)
    k, n_T = scenario.k, scenario.n_T
    payload = strategy.transmit(k, n_T, rng)

    base_masks = []
    for cluster in scenario.drone_eps:
        eps = np.asarray(cluster)[:, None]
        arrived = rng.random((len(cluster), n_T)) >= eps
        base_masks.append(arrived.any(axis=0))

    decoded = [strategy.decode(payload, mask, k) for mask in base_masks]
    per_base_full = tuple(result.full for result in decoded)

    union_count: Optional[int] = None
    if scenario.connectivity is Connectivity.INTERCONNECTED:
        if len(base_masks) == 1:
            union_count = decoded[0].count
        else:
            union_count = strategy.decode(payload, np.logical_or.reduce(base_masks), k).count
        mission = union_count == k
    else:
        mission = all(per_base_full)

    return TrialOutcome(
        per_base_received=tuple(result.received for result in decoded),
        per_base_decoded_count=tuple(result.count for result in decoded),
        per_base_full=per_base_full,
        union_decoded_count=union_count,
        mission_success=mission,
    )


def check_metric(scenario: Scenario, metric: Metric) -> None:
    if metric.name == Metric.MISSION:
        return
    if metric.name not in (Metric.BASE_FULL, Metric.BASE_PARTIAL):
        raise ValueError(f"unknown metric {metric.name!r}")
    if metric.base is None or not 1 <= metric.base <= scenario.N:
        raise ValueError(f"base index {metric.base} outside 1..{scenario.N}")
    if metric.name == Metric.BASE_PARTIAL and (metric.mu is None or not 0 <= metric.mu <= scenario.k):
        raise ValueError(f"mu must lie in 0..{scenario.k}, got {metric.mu}")


def _hit(outcome: TrialOutcome, metric: Metric) -> bool:
    if metric.name == Metric.MISSION:
        return outcome.mission_success
    idx = metric.base - 1
    if metric.name == Metric.BASE_FULL:
        return outcome.per_base_full[idx]
    return outcome.per_base_decoded_count[idx] >= metric.mu


def _run_block(
    scenario: Scenario, metrics: Tuple[Metric, ...], seed: int, block: int, size: int
) -> Tuple[int, ...]:
    rng = trial_stream(seed, block)
    counts = [0] * len(metrics)
    for _ in range(size):
        outcome = run_trial(scenario, rng)
        for i, metric in enumerate(metrics):
            if _hit(outcome, metric):
                counts[i] += 1
    logger.debug("block %d: %d trials, successes %s", block, size, counts)
    return tuple(counts)


def estimate_many(
    scenario: Scenario,
    metrics: Sequence[Metric],
    trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> Dict[Metric, SimEstimate]:
    """Estimate several metrics from the same simulated trials."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    metrics = tuple(dict.fromkeys(metrics))
    for metric in metrics:
        check_metric(scenario, metric)

    blocks = range((trials + TRIALS_PER_STREAM - 1) // TRIALS_PER_STREAM)
    sizes = [min(TRIALS_PER_STREAM, trials - b * TRIALS_PER_STREAM) for b in blocks]
    job = partial(_run_block, scenario, metrics, seed)
    pool_size = workers if workers is not None else get_settings().WORKERS

    if pool_size > 1 and len(sizes) > 1:
        with ProcessPoolExecutor(max_workers=pool_size) as executor:
            results = list(executor.map(job, blocks, sizes))
    else:
        results = [job(b, size) for b, size in zip(blocks, sizes)]

    totals = [sum(column) for column in zip(*results)]
    return {
        metric: SimEstimate.from_counts(metric.label, trials, totals[i], seed)
        for i, metric in enumerate(metrics)
    }


def estimate(
    scenario: Scenario,
    metric: Metric,
    trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> SimEstimate:
    return estimate_many(scenario, [metric], trials, seed, workers)[metric]


def bound_gap(
    scenario: Scenario, trials: int, seed: int, workers: Optional[int] = None
) -> Tuple[float, float]:
    """Simulated isolated-RLNC mission success minus the per-base product
    bound, with the simulation standard error."""
    if not isinstance(scenario.scheme, SystematicRlnc):
        raise ValueError("bound_gap applies to systematic RLNC")
    isolated = scenario.with_connectivity(Connectivity.ISOLATED)
    sim = estimate(isolated, Metric.mission(), trials, seed, workers)
    return sim.estimate - mission_isolated(isolated).value, sim.std_error
