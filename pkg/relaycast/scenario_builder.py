from __future__ import annotations

from typing import List, Optional, Sequence

from .analytic import resolve_erasure
from .errors import ScenarioValidationError
from .models import (
    Carousel,
    Connectivity,
    ErasureSpec,
    Scenario,
    Scheme,
    SystematicRlnc,
)


class ScenarioBuilder:
    """Builder pattern for assembling validated scenarios.

    Used by the file adapter, by sweeps (one scenario per grid point) and by
    tests. Erasure specs are resolved to probabilities once, in build().
    """

    def __init__(self) -> None:
        self._k: Optional[int] = None
        self._n_T: Optional[int] = None
        self._scheme: Scheme = Carousel()
        self._clusters: List[List[ErasureSpec]] = []
        self._connectivity = Connectivity.ISOLATED

    def with_message(self, k: int) -> "ScenarioBuilder":
        self._k = int(k)
        return self

    def with_transmissions(self, n_T: int) -> "ScenarioBuilder":
        self._n_T = int(n_T)
        return self

    def with_carousel(self) -> "ScenarioBuilder":
        self._scheme = Carousel()
        return self

    def with_rlnc(self, q: int) -> "ScenarioBuilder":
        self._scheme = SystematicRlnc(int(q))
        return self

    def with_scheme(self, scheme: Scheme) -> "ScenarioBuilder":
        self._scheme = scheme
        return self

    def with_cluster(self, drones: Sequence[ErasureSpec]) -> "ScenarioBuilder":
        self._clusters.append(list(drones))
        return self

    def with_clusters(self, clusters: Sequence[Sequence[ErasureSpec]]) -> "ScenarioBuilder":
        self._clusters = [list(cluster) for cluster in clusters]
        return self

    def with_homogeneous_clusters(
        self, count: int, drones: int, eps: ErasureSpec
    ) -> "ScenarioBuilder":
        """``count`` clusters of ``drones`` drones sharing one erasure spec."""
        self._clusters = [[eps] * int(drones) for _ in range(int(count))]
        return self

    def with_connectivity(self, connectivity: Connectivity | str) -> "ScenarioBuilder":
        self._connectivity = Connectivity(connectivity)
        return self

    def build(self) -> Scenario:
        if self._k is None:
            raise ScenarioValidationError("k: missing")
        n_T = self._n_T if self._n_T is not None else self._k
        resolved = []
        problems = []
        for i, cluster in enumerate(self._clusters):
            row = []
            for j, spec in enumerate(cluster):
                try:
                    row.append(resolve_erasure(spec))
                except ValueError as exc:
                    problems.append(f"clusters.{i}.{j}: {exc}")
                    row.append(0.0)
            resolved.append(tuple(row))
        if problems:
            raise ScenarioValidationError("; ".join(problems))
        return Scenario(
            k=self._k,
            n_T=n_T,
            scheme=self._scheme,
            clusters=tuple(tuple(cluster) for cluster in self._clusters),
            drone_eps=tuple(resolved),
            connectivity=self._connectivity,
        )
