from __future__ import annotations

import math

import numpy as np
import pytest

from relaycast.analytic import (
    base_partial,
    binomial_weights,
    equivalent_erasure,
    evaluate,
    min_transmissions,
    mission_interconnected,
    mission_isolated,
    nakagami_erasure,
    p_dc_full,
    p_dc_partial,
    p_large_field_full,
    p_sr_full_mix,
    p_sr_partial_mix,
    p_sr_partial_mix_total,
    union_erasure,
)
from relaycast.errors import InfeasibleAtCapError
from relaycast.models import Carousel, Connectivity, Metric, NakagamiLink, Provenance, SystematicRlnc
from relaycast.scenario_builder import ScenarioBuilder

CLUSTER_1 = [0.45, 0.55, 0.65]
CLUSTER_2 = [0.3, 0.4]


def _two_cluster_scenario(scheme, n_T: int, connectivity: str = "isolated"):
    return (
        ScenarioBuilder()
        .with_message(20)
        .with_transmissions(n_T)
        .with_scheme(scheme)
        .with_cluster(CLUSTER_1)
        .with_cluster(CLUSTER_2)
        .with_connectivity(connectivity)
        .build()
    )


def _single_cluster(scheme, drones: int, eps: float, k: int = 30):
    return (
        ScenarioBuilder()
        .with_message(k)
        .with_scheme(scheme)
        .with_homogeneous_clusters(1, drones, eps)
        .build()
    )


def test_nakagami_erasure_examples() -> None:
    assert nakagami_erasure(NakagamiLink(1.0, 10.0, 1.0)) == pytest.approx(0.1)
    assert nakagami_erasure(NakagamiLink(1.0, 0.5, 1.0)) == 1.0
    assert nakagami_erasure(NakagamiLink(2.0, 10.0, 1.0)) == pytest.approx(0.04)
    assert nakagami_erasure(NakagamiLink(200.0, 1.0, 1.0)) == 1.0
    assert 0.0 <= nakagami_erasure(NakagamiLink(200.0, 1000.0, 1.0)) < 1e-300


def test_equivalent_erasure_examples() -> None:
    assert equivalent_erasure(CLUSTER_1) == pytest.approx(0.160875)
    assert equivalent_erasure(CLUSTER_2) == pytest.approx(0.12)
    assert equivalent_erasure([0.0, 0.9]) == 0.0
    with pytest.raises(ValueError):
        equivalent_erasure([])
    with pytest.raises(ValueError):
        equivalent_erasure([1.2])


def test_binomial_weights_sum_to_one_for_large_n_T() -> None:
    for n_T, eps in [(3, 0.5), (40, 0.1), (5000, 0.3), (10000, 0.999)]:
        weights = binomial_weights(n_T, eps)
        assert weights.shape == (n_T + 1,)
        assert np.all(weights >= 0)
        assert weights.sum() == pytest.approx(1.0, abs=1e-9)
    assert binomial_weights(3, 0.5).tolist() == pytest.approx([0.125, 0.375, 0.375, 0.125])


def test_p_dc_full_examples() -> None:
    assert p_dc_full(0.0, 5, 7) == 1.0
    assert p_dc_full(0.5, 2, 3) == pytest.approx(0.375)
    assert p_dc_full(0.5, 2, 4) == pytest.approx(0.5625)
    with pytest.raises(ValueError):
        p_dc_full(0.5, 3, 2)


def test_p_dc_partial_examples() -> None:
    assert p_dc_partial(0.5, 1, 2, 3) == pytest.approx(0.875)
    assert p_dc_partial(0.7, 0, 4, 9) == pytest.approx(1.0)


def test_p_dc_partial_with_mu_equal_k_matches_full() -> None:
    for eps in (0.0, 0.1, 0.45, 0.9):
        for k in range(1, 7):
            for n_T in range(k, 13):
                assert p_dc_partial(eps, k, k, n_T) == pytest.approx(p_dc_full(eps, k, n_T), abs=1e-12)


def test_p_sr_full_mix_examples() -> None:
    assert p_sr_full_mix(0.0, 4, 4, 2) == 1.0
    assert p_sr_full_mix(1.0, 4, 6, 2) == 0.0
    assert p_sr_full_mix(0.5, 2, 3, 2) == pytest.approx(0.375)
    assert p_large_field_full(0.5, 2, 3) == pytest.approx(0.5)


def test_p_sr_partial_mix_properties() -> None:
    for q in (2, 8):
        assert p_sr_partial_mix(0.3, 5, 5, 8, q) == pytest.approx(p_sr_full_mix(0.3, 5, 8, q))
        assert p_sr_partial_mix(1.0, 1, 5, 8, q) == 0.0
        previous = 1.0
        for mu in range(6):
            truncated = p_sr_partial_mix(0.3, mu, 5, 8, q)
            total = p_sr_partial_mix_total(0.3, mu, 5, 8, q)
            assert truncated <= previous + 1e-12
            assert truncated <= total + 1e-12
            previous = truncated
    assert p_sr_partial_mix_total(0.5, 0, 3, 5, 2) == pytest.approx(1.0)


def test_large_field_limit_dominates_finite_fields() -> None:
    for q in (2, 4, 16):
        for eps in (0.05, 0.3, 0.6):
            assert p_sr_full_mix(eps, 6, 10, q) <= p_large_field_full(eps, 6, 10) + 1e-12


def test_full_recovery_monotone_in_eps_and_n_T() -> None:
    eps_grid = np.linspace(0.0, 1.0, 11)
    for k in (1, 3, 6):
        for n_T in range(k, k + 6):
            for fn in (lambda e: p_dc_full(e, k, n_T), lambda e: p_sr_full_mix(e, k, n_T, 2)):
                values = [fn(float(e)) for e in eps_grid]
                assert all(0.0 <= v <= 1.0 for v in values)
                assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))
            for eps in (0.1, 0.5):
                assert p_dc_full(eps, k, n_T) <= p_dc_full(eps, k, n_T + 1) + 1e-12
                assert p_sr_full_mix(eps, k, n_T, 4) <= p_sr_full_mix(eps, k, n_T + 1, 4) + 1e-12


def test_mission_isolated_carousel() -> None:
    perfect = (
        ScenarioBuilder().with_message(4).with_transmissions(6)
        .with_cluster([0.0]).with_cluster([0.0]).build()
    )
    assert mission_isolated(perfect).value == 1.0

    scenario = _two_cluster_scenario(Carousel(), 30)
    result = mission_isolated(scenario)
    assert result.kind is Provenance.EXACT
    for eps in (0.160875, 0.12):
        assert result.value < p_dc_full(eps, 20, 30)


def test_mission_isolated_rlnc_is_a_lower_bound() -> None:
    result = mission_isolated(_two_cluster_scenario(SystematicRlnc(2), 24))
    assert result.kind is Provenance.LOWER_BOUND
    assert 0.0 < result.value < 1.0


def test_mission_functions_reject_wrong_connectivity() -> None:
    with pytest.raises(ValueError):
        mission_isolated(_two_cluster_scenario(Carousel(), 30, "interconnected"))
    with pytest.raises(ValueError):
        mission_interconnected(_two_cluster_scenario(Carousel(), 30, "isolated"))


def test_union_erasure_covers_every_drone() -> None:
    scenario = _two_cluster_scenario(Carousel(), 30)
    assert union_erasure(scenario) == pytest.approx(0.019305, abs=1e-6)


def test_interconnected_checkpoints() -> None:
    carousel = mission_interconnected(_two_cluster_scenario(Carousel(), 35, "interconnected"))
    assert carousel.value == pytest.approx(0.9, abs=0.03)
    gf8 = mission_interconnected(_two_cluster_scenario(SystematicRlnc(8), 21, "interconnected"))
    assert gf8.value == pytest.approx(0.9, abs=0.03)
    gf2 = mission_interconnected(_two_cluster_scenario(SystematicRlnc(2), 22, "interconnected"))
    assert gf2.value == pytest.approx(0.9, abs=0.03)


def test_interconnected_never_below_isolated() -> None:
    rng = np.random.default_rng(3)
    for _ in range(25):
        clusters = [list(rng.uniform(0.0, 0.8, size=rng.integers(1, 4))) for _ in range(rng.integers(1, 4))]
        k = int(rng.integers(1, 8))
        n_T = k + int(rng.integers(0, 8))
        for scheme in (Carousel(), SystematicRlnc(2), SystematicRlnc(4)):
            scenario = (
                ScenarioBuilder().with_message(k).with_transmissions(n_T)
                .with_scheme(scheme).with_clusters(clusters).build()
            )
            isolated = mission_isolated(scenario).value
            joined = mission_interconnected(scenario.with_connectivity(Connectivity.INTERCONNECTED)).value
            assert joined >= isolated - 1e-12


def test_gf2_beats_gf8_for_partial_recovery_at_low_n_T() -> None:
    eps = equivalent_erasure(CLUSTER_1)
    for n_T in range(21, 25):
        assert p_sr_partial_mix_total(eps, 18, 20, n_T, 2) > p_sr_partial_mix_total(eps, 18, 20, n_T, 8)
    # With n >= k received and at most two sources missing, 18 are always decoded.
    for n_T in (21, 22):
        assert p_sr_partial_mix(eps, 18, 20, n_T, 2) == pytest.approx(p_sr_partial_mix(eps, 18, 20, n_T, 8))


def test_evaluate_dispatches_metrics() -> None:
    scenario = _two_cluster_scenario(SystematicRlnc(2), 24)
    partial = evaluate(scenario, Metric.base_partial(2, 15))
    assert partial.name == "base_partial(2,mu=15)"
    assert partial.value == pytest.approx(base_partial(SystematicRlnc(2), 0.12, 15, 20, 24))
    assert evaluate(scenario, Metric.base_full(1)).value == pytest.approx(p_sr_full_mix(0.160875, 20, 24, 2))
    with pytest.raises(ValueError):
        evaluate(scenario, Metric.base_full(3))


def test_min_transmissions_checkpoints() -> None:
    for scheme in (Carousel(), SystematicRlnc(2)):
        n_T, result = min_transmissions(_single_cluster(scheme, 9, 0.4), 0.99)
        assert n_T == 30
        assert result.value >= 0.99
        assert result.name == Metric.MISSION
    assert min_transmissions(_single_cluster(Carousel(), 3, 0.0, k=12), 0.99)[0] == 12

    for drones in (4, 8):
        rlnc, _ = min_transmissions(_single_cluster(SystematicRlnc(2), drones, 0.4), 0.99)
        carousel, _ = min_transmissions(_single_cluster(Carousel(), drones, 0.4), 0.99)
        assert rlnc < carousel


def test_min_transmissions_is_minimal() -> None:
    for scheme in (Carousel(), SystematicRlnc(2), SystematicRlnc(8)):
        template = _single_cluster(scheme, 3, 0.4, k=10)
        n_T, result = min_transmissions(template, 0.95)
        assert result.value >= 0.95
        assert result == evaluate(template.with_transmissions(n_T), Metric.mission())
        if n_T > template.k:
            before = evaluate(template.with_transmissions(n_T - 1), Metric.mission()).value
            assert before < 0.95


def test_min_transmissions_reports_infeasible_cap() -> None:
    with pytest.raises(InfeasibleAtCapError) as info:
        min_transmissions(_single_cluster(Carousel(), 1, 0.99, k=5), 0.99, cap=10)
    assert info.value.cap == 10
    assert 0.0 <= info.value.best < 0.99
    with pytest.raises(ValueError):
        min_transmissions(_single_cluster(Carousel(), 1, 0.1, k=5), 1.0)


def test_probabilities_stay_in_range() -> None:
    for eps in (0.0, 1e-9, 0.5, 1.0 - 1e-9, 1.0):
        for value in (
            p_dc_full(eps, 4, 9),
            p_dc_partial(eps, 2, 4, 9),
            p_sr_full_mix(eps, 4, 9, 2),
            p_sr_partial_mix(eps, 2, 4, 9, 2),
        ):
            assert 0.0 <= value <= 1.0 and not math.isnan(value)
