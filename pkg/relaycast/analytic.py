"""Closed-form success probabilities for carousel and systematic RLNC broadcast.

Erasure probabilities are floats; the RLNC kernels come exact from
``combin`` and are mixed here in double precision.
"""

from __future__ import annotations

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from utils.settings import get_settings

from .combin import p_sr_full, p_sr_partial
from .errors import InfeasibleAtCapError
from .models import (
    Carousel,
    Connectivity,
    ErasureSpec,
    Metric,
    NakagamiLink,
    ProbResult,
    Provenance,
    Scenario,
    Scheme,
    SystematicRlnc,
)

logger = logging.getLogger(__name__)

# Binomial weights below this contribute less than n_T * 1e-20 in total.
_NEGLIGIBLE_WEIGHT = 1e-20


def nakagami_erasure(link: NakagamiLink) -> float:
    """High-SNR packet erasure approximation, clamped to 1 at low SNR.

    Evaluated in the log domain; large shape factors overflow otherwise.
    """
    m = link.m_shape
    log_value = m * math.log(m / link.mean_snr) + math.log(link.w_m) - float(gammaln(m))
    return math.exp(min(0.0, log_value))


def resolve_erasure(spec: ErasureSpec) -> float:
    if isinstance(spec, NakagamiLink):
        return nakagami_erasure(spec)
    eps = float(spec)
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"erasure probability must lie in [0, 1], got {eps}")
    return eps


def equivalent_erasure(cluster_eps: Sequence[float]) -> float:
    """Probability that every drone of the group misses a given packet."""
    if len(cluster_eps) == 0:
        raise ValueError("a cluster needs at least one drone")
    for eps in cluster_eps:
        if not 0.0 <= eps <= 1.0:
            raise ValueError(f"erasure probability must lie in [0, 1], got {eps}")
    return math.prod(cluster_eps)


def cluster_erasures(scenario: Scenario) -> Tuple[float, ...]:
    return tuple(equivalent_erasure(cluster) for cluster in scenario.drone_eps)


def union_erasure(scenario: Scenario) -> float:
    """All L drones treated as one cluster."""
    return equivalent_erasure([eps for cluster in scenario.drone_eps for eps in cluster])


def _check_eps(eps: float) -> None:
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"erasure probability must lie in [0, 1], got {eps}")


def _check_counts(k: int, n_T: int, mu: Optional[int] = None) -> None:
    if k < 1 or n_T < k:
        raise ValueError(f"need n_T >= k >= 1, got k={k}, n_T={n_T}")
    if mu is not None and not 0 <= mu <= k:
        raise ValueError(f"need 0 <= mu <= k, got mu={mu}, k={k}")


def binomial_weights(n_T: int, eps: float) -> np.ndarray:
    """P(n of n_T packets arrive) for n = 0..n_T, each arriving w.p. 1 - eps.

    Built outward from the mode with the ratio recurrence so nothing
    overflows for large n_T.
    """
    _check_eps(eps)
    weights = np.zeros(n_T + 1)
    if eps == 0.0:
        weights[n_T] = 1.0
        return weights
    if eps == 1.0:
        weights[0] = 1.0
        return weights
    success = 1.0 - eps
    mode = min(n_T, int((n_T + 1) * success))
    weights[mode] = math.exp(
        gammaln(n_T + 1)
        - gammaln(mode + 1)
        - gammaln(n_T - mode + 1)
        + mode * math.log(success)
        + (n_T - mode) * math.log(eps)
    )
    ratio = success / eps
    for n in range(mode, n_T):
        weights[n + 1] = weights[n] * (n_T - n) / (n + 1) * ratio
    for n in range(mode, 0, -1):
        weights[n - 1] = weights[n] * n / (n_T - n + 1) / ratio
    return weights


def _mix(weights: np.ndarray, start: int, kernel) -> float:
    total = 0.0
    for n in range(start, len(weights)):
        if weights[n] < _NEGLIGIBLE_WEIGHT:
            continue
        total += float(weights[n]) * float(kernel(n))
    return min(1.0, max(0.0, total))


def p_dc_full(eps: float, k: int, n_T: int) -> float:
    """Carousel: every source index received at least once."""
    _check_eps(eps)
    _check_counts(k, n_T)
    lam, rho = divmod(n_T, k)
    return (1.0 - eps ** (lam + 1)) ** rho * (1.0 - eps**lam) ** (k - rho)


def p_dc_partial(eps: float, mu: int, k: int, n_T: int) -> float:
    """Carousel: at least mu distinct source indices received.

    The first rho sources are sent lam + 1 times, the rest lam times; y1 and
    y2 count the distinct sources obtained from each group.
    """
    _check_eps(eps)
    _check_counts(k, n_T, mu)
    lam, rho = divmod(n_T, k)
    got_long = 1.0 - eps ** (lam + 1)
    got_short = 1.0 - eps**lam
    total = 0.0
    for y in range(mu, k + 1):
        for y1 in range(max(0, y - k + rho), min(y, rho) + 1):
            y2 = y - y1
            total += (
                math.comb(rho, y1)
                * math.comb(k - rho, y2)
                * got_long**y1
                * got_short**y2
                * eps ** (lam * (k - y1 - y2) + rho - y1)
            )
    return min(1.0, max(0.0, total))


def p_sr_full_mix(eps: float, k: int, n_T: int, q: int) -> float:
    """Systematic RLNC: full recovery averaged over the number received."""
    _check_counts(k, n_T)
    weights = binomial_weights(n_T, eps)
    return _mix(weights, k, lambda n: p_sr_full(k, n, n_T, q))


def p_sr_partial_mix(eps: float, mu: int, k: int, n_T: int, q: int) -> float:
    """Systematic RLNC: at least mu sources, mixed over n = k..n_T.

    The mixture starts at n = k for every mu, so for mu < k the outcomes with
    fewer than k received packets are left out; see p_sr_partial_mix_total.
    """
    _check_counts(k, n_T, mu)
    weights = binomial_weights(n_T, eps)
    return _mix(weights, k, lambda n: p_sr_partial(mu, k, n, n_T, q))


def p_sr_partial_mix_total(eps: float, mu: int, k: int, n_T: int, q: int) -> float:
    """Same as p_sr_partial_mix but mixed over every n that can reach mu."""
    _check_counts(k, n_T, mu)
    weights = binomial_weights(n_T, eps)
    return _mix(weights, mu, lambda n: p_sr_partial(mu, k, n, n_T, q))


def p_large_field_full(eps: float, k: int, n_T: int) -> float:
    """Limit of p_sr_full_mix as q grows: at least k packets arrive."""
    _check_counts(k, n_T)
    return min(1.0, float(binomial_weights(n_T, eps)[k:].sum()))


def base_full(scheme: Scheme, eps: float, k: int, n_T: int) -> float:
    if isinstance(scheme, SystematicRlnc):
        return p_sr_full_mix(eps, k, n_T, scheme.q)
    return p_dc_full(eps, k, n_T)


def base_partial(scheme: Scheme, eps: float, mu: int, k: int, n_T: int) -> float:
    if isinstance(scheme, SystematicRlnc):
        return p_sr_partial_mix_total(eps, mu, k, n_T, scheme.q)
    return p_dc_partial(eps, mu, k, n_T)


def mission_isolated(scenario: Scenario) -> ProbResult:
    """Every base decodes from its own cluster alone.

    Exact for the carousel. For RLNC all bases see the same coded packets, so
    the per-base product is only a lower bound.
    """
    if scenario.connectivity is not Connectivity.ISOLATED:
        raise ValueError("mission_isolated needs isolated connectivity")
    value = math.prod(
        base_full(scenario.scheme, eps, scenario.k, scenario.n_T)
        for eps in cluster_erasures(scenario)
    )
    kind = Provenance.LOWER_BOUND if isinstance(scenario.scheme, SystematicRlnc) else Provenance.EXACT
    return ProbResult(name=Metric.MISSION, value=value, kind=kind)


def mission_interconnected(scenario: Scenario) -> ProbResult:
    if scenario.connectivity is not Connectivity.INTERCONNECTED:
        raise ValueError("mission_interconnected needs interconnected connectivity")
    value = base_full(scenario.scheme, union_erasure(scenario), scenario.k, scenario.n_T)
    return ProbResult(name=Metric.MISSION, value=value, kind=Provenance.EXACT)


def mission_success(scenario: Scenario) -> ProbResult:
    if scenario.connectivity is Connectivity.INTERCONNECTED:
        return mission_interconnected(scenario)
    return mission_isolated(scenario)


def evaluate(scenario: Scenario, metric: Metric) -> ProbResult:
    """Analytic value of a mission or per-base metric."""
    if metric.name == Metric.MISSION:
        return mission_success(scenario)
    if metric.base is None or not 1 <= metric.base <= scenario.N:
        raise ValueError(f"base index {metric.base} outside 1..{scenario.N}")
    eps = cluster_erasures(scenario)[metric.base - 1]
    if metric.name == Metric.BASE_FULL:
        value = base_full(scenario.scheme, eps, scenario.k, scenario.n_T)
    elif metric.name == Metric.BASE_PARTIAL:
        if metric.mu is None:
            raise ValueError("base_partial needs mu")
        value = base_partial(scenario.scheme, eps, metric.mu, scenario.k, scenario.n_T)
    else:
        raise ValueError(f"unknown metric {metric.name!r}")
    return ProbResult(name=metric.label, value=value, kind=Provenance.EXACT)


def min_transmissions(
    template: Scenario, target: float, cap: Optional[int] = None
) -> Tuple[int, ProbResult]:
    """Smallest n_T >= k whose mission success reaches ``target``.

    Returns ``(n_T, result)`` with the mission-success result at that n_T.
    Mission success is nondecreasing in n_T, so a unit-step scan from k finds
    the minimum. Raises InfeasibleAtCapError past ``cap`` (default
    settings.MAX_TRANSMISSIONS).
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target must lie in (0, 1), got {target}")
    limit = cap if cap is not None else get_settings().MAX_TRANSMISSIONS
    best = 0.0
    for n_T in range(template.k, max(limit, template.k) + 1):
        result = mission_success(template.with_transmissions(n_T))
        logger.debug("min_transmissions n_T=%d value=%.6f", n_T, result.value)
        best = max(best, result.value)
        if result.value >= target:
            return n_T, result
    raise InfeasibleAtCapError(limit, best)

