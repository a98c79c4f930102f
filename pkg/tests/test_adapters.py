from __future__ import annotations

import json

import pytest

from relaycast.adapters import (
    ScenarioFileAdapter,
    SweepFileAdapter,
    dump_scenario,
    load_json,
    loads_json,
    parse_scenario,
    parse_sweep,
    scenario_from_json,
    scenario_to_json,
)
from relaycast.errors import ScenarioParseError, ScenarioValidationError
from relaycast.models import Connectivity, Metric, NakagamiLink, SystematicRlnc
from relaycast.scenario_builder import ScenarioBuilder

TWO_CLUSTERS = {
    "k": 20,
    "n_T_range": [20, 35],
    "scheme": {"type": "rlnc", "q": 2},
    "clusters": [[0.45, 0.55, 0.65], [0.3, 0.4]],
    "connectivity": "interconnected",
    "metrics": [
        {"name": "mission_success"},
        {"name": "base_full", "base": 2},
        {"name": "base_partial", "base": 1, "mu": [18, 20]},
    ],
    "trials": 50000,
    "seed": 2024,
}

PARTIAL_SWEEP = {
    "k": 30,
    "schemes": [{"type": "rlnc", "q": 2}, {"type": "rlnc", "q": 4}, {"type": "rlnc", "q": 8}],
    "L": [2, 4, 8],
    "eps": {"start": 0.05, "stop": 0.95, "step": 0.05},
    "n_T": [36],
    "metric": {"name": "base_partial", "base": 1},
    "mu_fraction": [0.8, 1.0],
}


def test_scenario_file_expands_n_T_range_and_metrics() -> None:
    adapter = ScenarioFileAdapter()
    document = parse_scenario(TWO_CLUSTERS)

    scenarios = adapter.adapt(document)
    assert [s.n_T for s in scenarios] == list(range(20, 36))
    assert scenarios[0].scheme == SystematicRlnc(2)
    assert scenarios[0].connectivity is Connectivity.INTERCONNECTED
    assert scenarios[0].drone_eps == ((0.45, 0.55, 0.65), (0.3, 0.4))

    assert adapter.metrics(document) == [
        Metric.mission(),
        Metric.base_full(2),
        Metric.base_partial(1, 18),
        Metric.base_partial(1, 20),
    ]


def test_nakagami_drones_are_accepted() -> None:
    data = dict(TWO_CLUSTERS, clusters=[[{"m": 2, "mean_snr": 10, "w_m": 1}, 0.3]])
    data["metrics"] = [{"name": "mission_success"}]
    scenario = ScenarioFileAdapter().adapt(parse_scenario(data))[0]
    assert scenario.clusters[0][0] == NakagamiLink(2.0, 10.0, 1.0)
    assert scenario.drone_eps[0][0] == pytest.approx(0.04)

    data["clusters"] = [[{"m": 200, "mean_snr": 1, "w_m": 1}, 0.3]]
    scenario = ScenarioFileAdapter().adapt(parse_scenario(data))[0]
    assert scenario.drone_eps[0][0] == 1.0


def test_scenario_round_trip_is_identical() -> None:
    scenario = (
        ScenarioBuilder()
        .with_message(6)
        .with_transmissions(9)
        .with_rlnc(4)
        .with_cluster([0.1, NakagamiLink(1.5, 20.0, 2.0)])
        .with_cluster([0.25])
        .with_connectivity("interconnected")
        .build()
    )
    metrics = [Metric.mission(), Metric.base_partial(2, 3), Metric.base_partial(2, 5)]

    text = scenario_to_json(scenario, metrics, trials=100, seed=3)
    document = scenario_from_json(text)
    again = ScenarioFileAdapter().adapt(document)

    assert again == [scenario]
    assert ScenarioFileAdapter().metrics(document) == metrics
    assert dump_scenario(document) == text


def test_malformed_json_reports_line_and_column() -> None:
    with pytest.raises(ScenarioParseError, match="line 2, column"):
        loads_json('{"k": 20,\n "n_T": }')
    with pytest.raises(ScenarioParseError, match="JSON object"):
        loads_json("[1, 2]")


def test_missing_file_is_a_parse_error(tmp_path) -> None:
    with pytest.raises(ScenarioParseError):
        load_json(tmp_path / "nope.json")


def test_validation_errors_name_the_key() -> None:
    data = dict(TWO_CLUSTERS)
    del data["scheme"]
    with pytest.raises(ScenarioValidationError, match="scheme"):
        parse_scenario(data)

    with pytest.raises(ScenarioValidationError, match=r"clusters\.1\.0"):
        parse_scenario(dict(TWO_CLUSTERS, clusters=[[0.1], [1.7]]))

    with pytest.raises(ScenarioValidationError, match="n_T must be ≥ k"):
        parse_scenario(dict(TWO_CLUSTERS, n_T_range=[10, 35]))

    with pytest.raises(ScenarioValidationError, match=r"metrics\.0\.base"):
        parse_scenario(dict(TWO_CLUSTERS, metrics=[{"name": "base_full", "base": 3}]))

    with pytest.raises(ScenarioValidationError, match="q"):
        parse_scenario(dict(TWO_CLUSTERS, scheme={"type": "rlnc"}))

    with pytest.raises(ScenarioValidationError, match="not a prime power"):
        parse_scenario(dict(TWO_CLUSTERS, scheme={"type": "rlnc", "q": 6}))


def test_partial_recovery_sweep_expands_to_full_grid() -> None:
    document = parse_sweep(PARTIAL_SWEEP)
    adapter = SweepFileAdapter()

    assert document.eps_values()[0] == 0.05
    assert document.eps_values()[-1] == 0.95
    assert len(document.eps_values()) == 19
    assert document.mu_values() == [24, 30]
    assert adapter.count(document) == 342

    points = adapter.adapt(document)
    assert len(points) == 342
    assert {p.scenario.n_T for p in points} == {36}
    assert {p.L for p in points} == {2, 4, 8}


def test_target_sweep_has_one_point_per_scheme_L_and_eps() -> None:
    document = parse_sweep(
        {
            "k": 30,
            "schemes": [{"type": "carousel"}, {"type": "rlnc", "q": 2}],
            "L": list(range(1, 13)),
            "eps": [0.1, 0.4, 0.7],
            "target": 0.99,
        }
    )
    points = SweepFileAdapter().adapt(document)
    assert len(points) == 2 * 12 * 3
    assert all(p.metric is None and p.target == 0.99 for p in points)


def test_empty_sweep_grid_is_rejected() -> None:
    with pytest.raises(ScenarioValidationError, match="grid"):
        parse_sweep(dict(PARTIAL_SWEEP, L=[]))
    with pytest.raises(ScenarioValidationError, match="metric"):
        parse_sweep(dict(PARTIAL_SWEEP, target=0.9))


def test_worked_example_file_parses(tmp_path) -> None:
    path = tmp_path / "two_clusters.json"
    path.write_text(json.dumps(TWO_CLUSTERS), encoding="utf-8")
    assert parse_scenario(load_json(path)).k == 20
