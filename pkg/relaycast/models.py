from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Tuple, Union

from .errors import ScenarioValidationError


class Connectivity(str, Enum):
    ISOLATED = "isolated"
    INTERCONNECTED = "interconnected"


class Provenance(str, Enum):
    EXACT = "exact"
    LOWER_BOUND = "lower_bound"
    SIMULATED = "simulated"


@dataclass(frozen=True)
class Carousel:
    name = "carousel"

    @property
    def q(self) -> Optional[int]:
        return None


@dataclass(frozen=True)
class SystematicRlnc:
    q: int
    name = "rlnc"


Scheme = Union[Carousel, SystematicRlnc]


@dataclass(frozen=True)
class NakagamiLink:
    """Link described by Nakagami-m fading instead of a fixed erasure rate."""

    m_shape: float
    mean_snr: float
    w_m: float

    def __post_init__(self) -> None:
        if self.m_shape < 0.5:
            raise ValueError(f"Nakagami shape factor must be >= 0.5, got {self.m_shape}")
        if self.mean_snr <= 0:
            raise ValueError(f"mean SNR must be > 0, got {self.mean_snr}")
        if self.w_m <= 0:
            raise ValueError(f"SNR threshold w_m must be > 0, got {self.w_m}")


ErasureSpec = Union[float, NakagamiLink]


@dataclass(frozen=True)
class Scenario:
    """One broadcast configuration.

    ``clusters`` keeps each drone's erasure spec as given; ``drone_eps`` holds
    the resolved per-drone erasure probabilities in the same shape.
    """

    k: int
    n_T: int
    scheme: Scheme
    clusters: Tuple[Tuple[ErasureSpec, ...], ...]
    drone_eps: Tuple[Tuple[float, ...], ...]
    connectivity: Connectivity = Connectivity.ISOLATED

    def __post_init__(self) -> None:
        problems = []
        if self.k < 1:
            problems.append("k: must be >= 1")
        if self.n_T < self.k:
            problems.append("n_T: n_T must be ≥ k")
        if isinstance(self.scheme, SystematicRlnc) and self.scheme.q < 2:
            problems.append("scheme.q: field order must be >= 2")
        if not self.clusters:
            problems.append("clusters: at least one cluster is required")
        if len(self.clusters) != len(self.drone_eps):
            problems.append("clusters: resolved erasures do not match the cluster layout")
        for i, cluster in enumerate(self.drone_eps):
            if not cluster:
                problems.append(f"clusters.{i}: every cluster needs at least one drone")
            for j, eps in enumerate(cluster):
                if not (0.0 <= eps <= 1.0) or math.isnan(eps):
                    problems.append(f"clusters.{i}.{j}: erasure probability {eps} outside [0, 1]")
        if problems:
            raise ScenarioValidationError("; ".join(problems))

    @property
    def N(self) -> int:
        return len(self.clusters)

    @property
    def L(self) -> int:
        return sum(len(cluster) for cluster in self.clusters)

    @property
    def q(self) -> Optional[int]:
        return self.scheme.q

    def with_transmissions(self, n_T: int) -> "Scenario":
        return replace(self, n_T=n_T)

    def with_connectivity(self, connectivity: Connectivity) -> "Scenario":
        return replace(self, connectivity=connectivity)


@dataclass(frozen=True)
class Metric:
    """A simulated or analytic quantity; ``base`` is 1-based."""

    name: str
    base: Optional[int] = None
    mu: Optional[int] = None

    MISSION = "mission_success"
    BASE_FULL = "base_full"
    BASE_PARTIAL = "base_partial"

    @classmethod
    def mission(cls) -> "Metric":
        return cls(cls.MISSION)

    @classmethod
    def base_full(cls, base: int) -> "Metric":
        return cls(cls.BASE_FULL, base=base)

    @classmethod
    def base_partial(cls, base: int, mu: int) -> "Metric":
        return cls(cls.BASE_PARTIAL, base=base, mu=mu)

    @property
    def label(self) -> str:
        if self.name == self.MISSION:
            return self.name
        if self.name == self.BASE_FULL:
            return f"{self.name}({self.base})"
        return f"{self.name}({self.base},mu={self.mu})"

    def sort_key(self) -> Tuple[str, int, int]:
        return (self.name, self.base or 0, self.mu if self.mu is not None else -1)


@dataclass(frozen=True)
class ProbResult:
    name: str
    value: float
    kind: Provenance
    std_error: Optional[float] = None


@dataclass(frozen=True)
class TrialOutcome:
    per_base_received: Tuple[object, ...]
    per_base_decoded_count: Tuple[int, ...]
    per_base_full: Tuple[bool, ...]
    union_decoded_count: Optional[int]
    mission_success: bool


@dataclass(frozen=True)
class SimEstimate:
    metric: str
    trials: int
    successes: int
    estimate: float
    std_error: float
    seed: int

    @classmethod
    def from_counts(cls, metric: str, trials: int, successes: int, seed: int) -> "SimEstimate":
        estimate = successes / trials
        return cls(
            metric=metric,
            trials=trials,
            successes=successes,
            estimate=estimate,
            std_error=math.sqrt(estimate * (1.0 - estimate) / trials),
            seed=seed,
        )


@dataclass
class ResultRow:
    scheme: str
    q: Optional[int]
    connectivity: str
    k: int
    n_T: int
    metric: str
    mu: Optional[int] = None
    base_index: Optional[int] = None
    analytic_value: Optional[float] = None
    analytic_kind: str = "n/a"
    sim_value: Optional[float] = None
    sim_stderr: Optional[float] = None
    trials: Optional[int] = None
    seed: Optional[int] = None

    def sort_key(self) -> Tuple[int, str, int, int]:
        return (
            self.n_T,
            self.metric,
            self.base_index or 0,
            self.mu if self.mu is not None else -1,
        )


@dataclass
class SweepRow:
    scheme: str
    q: Optional[int]
    connectivity: str
    k: int
    clusters: int
    L: int
    eps: float
    n_T: Optional[int]
    metric: str
    mu: Optional[int] = None
    base_index: Optional[int] = None
    target: Optional[float] = None
    analytic_value: Optional[float] = None
    analytic_kind: str = "n/a"
    notes: str = field(default="")

    def sort_key(self) -> Tuple:
        return (
            self.scheme,
            self.q or 0,
            self.L,
            self.eps,
            self.n_T if self.n_T is not None else -1,
            self.metric,
            self.base_index or 0,
            self.mu if self.mu is not None else -1,
        )
