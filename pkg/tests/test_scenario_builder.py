import pytest

from relaycast.errors import ScenarioValidationError
from relaycast.models import Carousel, Connectivity, NakagamiLink, SystematicRlnc
from relaycast.scenario_builder import ScenarioBuilder


def test_build_defaults_to_carousel_isolated_and_n_T_equal_k() -> None:
    scenario = ScenarioBuilder().with_message(4).with_cluster([0.1, 0.2]).build()

    assert scenario.scheme == Carousel()
    assert scenario.connectivity is Connectivity.ISOLATED
    assert scenario.n_T == 4
    assert scenario.N == 1 and scenario.L == 2
    assert scenario.q is None


def test_homogeneous_clusters_repeat_the_erasure() -> None:
    scenario = (
        ScenarioBuilder()
        .with_message(30)
        .with_transmissions(36)
        .with_rlnc(8)
        .with_homogeneous_clusters(2, 3, 0.25)
        .with_connectivity("interconnected")
        .build()
    )

    assert scenario.drone_eps == ((0.25, 0.25, 0.25), (0.25, 0.25, 0.25))
    assert scenario.scheme == SystematicRlnc(8)
    assert scenario.q == 8
    assert scenario.connectivity is Connectivity.INTERCONNECTED


def test_nakagami_links_resolve_once_at_build() -> None:
    link = NakagamiLink(m_shape=2.0, mean_snr=10.0, w_m=1.0)
    scenario = ScenarioBuilder().with_message(2).with_cluster([link, 0.5]).build()

    assert scenario.clusters == ((link, 0.5),)
    assert scenario.drone_eps[0][0] == pytest.approx(0.04)


def test_n_T_below_k_is_rejected() -> None:
    with pytest.raises(ScenarioValidationError, match="n_T must be ≥ k"):
        ScenarioBuilder().with_message(5).with_transmissions(4).with_cluster([0.1]).build()


def test_bad_erasure_is_located_by_cluster_and_drone() -> None:
    builder = ScenarioBuilder().with_message(2).with_cluster([0.1]).with_cluster([0.2, 1.5])

    with pytest.raises(ScenarioValidationError, match=r"clusters\.1\.1"):
        builder.build()


def test_empty_layouts_are_rejected() -> None:
    with pytest.raises(ScenarioValidationError, match="at least one cluster"):
        ScenarioBuilder().with_message(2).build()
    with pytest.raises(ScenarioValidationError, match=r"clusters\.0"):
        ScenarioBuilder().with_message(2).with_cluster([]).build()
    with pytest.raises(ScenarioValidationError, match="k: missing"):
        ScenarioBuilder().with_cluster([0.1]).build()


def test_with_transmissions_returns_a_new_scenario() -> None:
    scenario = ScenarioBuilder().with_message(3).with_cluster([0.1]).build()
    longer = scenario.with_transmissions(9)

    assert longer.n_T == 9
    assert scenario.n_T == 3
