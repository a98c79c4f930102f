"""Scenario and sweep files: JSON schema (pydantic) and adapters to the domain model."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ScenarioParseError, ScenarioValidationError, UnsupportedFieldError
from .gfmat import field_for_order
from .models import (
    Carousel,
    ErasureSpec,
    Metric,
    NakagamiLink,
    Scenario,
    Scheme,
    SystematicRlnc,
)
from .scenario_builder import ScenarioBuilder

Probability = Annotated[float, Field(ge=0.0, le=1.0)]


class NakagamiModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    m: float = Field(ge=0.5)
    mean_snr: float = Field(gt=0)
    w_m: float = Field(gt=0)


DroneModel = Union[Probability, NakagamiModel]


class SchemeModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["carousel", "rlnc"]
    q: Optional[int] = Field(default=None, ge=2, le=256)

    @model_validator(mode="after")
    def _q_matches_type(self) -> "SchemeModel":
        if self.type == "rlnc" and self.q is None:
            raise ValueError("q: rlnc needs a field order q")
        if self.type == "carousel" and self.q is not None:
            raise ValueError("q: carousel takes no field order")
        if self.q is not None:
            try:
                field_for_order(self.q)
            except UnsupportedFieldError as exc:
                raise ValueError(f"q: {exc}") from exc
        return self

    def to_scheme(self) -> Scheme:
        return SystematicRlnc(self.q) if self.type == "rlnc" else Carousel()

    @classmethod
    def from_scheme(cls, scheme: Scheme) -> "SchemeModel":
        return cls(type=scheme.name, q=scheme.q)


class MetricModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: Literal["mission_success", "base_full", "base_partial"]
    base: Optional[int] = Field(default=None, ge=1)
    mu: Optional[List[int]] = None

    @model_validator(mode="after")
    def _fields_match_name(self) -> "MetricModel":
        if self.name != Metric.MISSION and self.base is None:
            raise ValueError(f"base: {self.name} needs a base index")
        if self.name == Metric.MISSION and self.base is not None:
            raise ValueError("base: mission_success takes no base index")
        if self.name != Metric.BASE_PARTIAL and self.mu is not None:
            raise ValueError("mu: only base_partial takes mu")
        return self

    def expand(self, mus: Optional[List[int]] = None) -> List[Metric]:
        if self.name == Metric.MISSION:
            return [Metric.mission()]
        if self.name == Metric.BASE_FULL:
            return [Metric.base_full(self.base)]
        return [Metric.base_partial(self.base, mu) for mu in (self.mu or mus or [])]


class ScenarioFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k: int = Field(ge=1)
    n_T: Optional[int] = Field(default=None, ge=1)
    n_T_range: Optional[Tuple[int, int]] = None
    scheme: SchemeModel
    clusters: List[Annotated[List[DroneModel], Field(min_length=1)]] = Field(min_length=1)
    connectivity: Literal["isolated", "interconnected"] = "isolated"
    metrics: List[MetricModel] = Field(
        default_factory=lambda: [MetricModel(name="mission_success")], min_length=1
    )
    trials: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _check_consistency(self) -> "ScenarioFile":
        if (self.n_T is None) == (self.n_T_range is None):
            raise ValueError("n_T: give exactly one of n_T or n_T_range")
        low, high = self.transmissions_span()
        if low > high:
            raise ValueError("n_T_range: start must not exceed stop")
        if low < self.k:
            raise ValueError("n_T: n_T must be ≥ k")
        for i, metric in enumerate(self.metrics):
            if metric.base is not None and metric.base > len(self.clusters):
                raise ValueError(f"metrics.{i}.base: base {metric.base} outside 1..{len(self.clusters)}")
            if metric.name == Metric.BASE_PARTIAL and not metric.mu:
                raise ValueError(f"metrics.{i}.mu: base_partial needs a mu list")
            for mu in metric.mu or []:
                if not 0 <= mu <= self.k:
                    raise ValueError(f"metrics.{i}.mu: mu={mu} outside 0..{self.k}")
        return self

    def transmissions_span(self) -> Tuple[int, int]:
        if self.n_T_range is not None:
            return self.n_T_range
        return (self.n_T, self.n_T)


class RangeModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    start: float
    stop: float
    step: float = Field(gt=0)

    def expand(self) -> List[float]:
        count = int(round((self.stop - self.start) / self.step)) + 1
        if count < 1:
            return []
        return [round(float(v), 10) for v in np.linspace(self.start, self.start + (count - 1) * self.step, count)]


class SweepFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k: int = Field(ge=1)
    schemes: List[SchemeModel]
    L: List[Annotated[int, Field(ge=1)]]
    eps: Union[List[Probability], RangeModel]
    n_T: List[int] = Field(default_factory=list)
    clusters: int = Field(default=1, ge=1)
    connectivity: Literal["isolated", "interconnected"] = "isolated"
    metric: Optional[MetricModel] = None
    mu: Optional[List[int]] = None
    mu_fraction: Optional[List[Annotated[float, Field(ge=0.0, le=1.0)]]] = None
    target: Optional[float] = Field(default=None, gt=0.0, lt=1.0)

    @model_validator(mode="after")
    def _check_grid(self) -> "SweepFile":
        if (self.metric is None) == (self.target is None):
            raise ValueError("metric: give exactly one of metric or target")
        if self.metric is not None and not self.n_T:
            raise ValueError("n_T: metric sweeps need a list of n_T values")
        for n_T in self.n_T:
            if n_T < self.k:
                raise ValueError(f"n_T: n_T must be ≥ k (got {n_T})")
        if self.metric is not None and self.metric.base is not None and self.metric.base > self.clusters:
            raise ValueError(f"metric.base: base {self.metric.base} outside 1..{self.clusters}")
        if self.metric is not None and self.metric.name == Metric.BASE_PARTIAL:
            mus = self.mu_values()
            if not mus:
                raise ValueError("mu: base_partial sweeps need mu or mu_fraction")
            for mu in mus:
                if not 0 <= mu <= self.k:
                    raise ValueError(f"mu: mu={mu} outside 0..{self.k}")
        if not self.schemes or not self.L or not self.eps_values():
            raise ValueError("grid: the sweep grid is empty")
        return self

    def eps_values(self) -> List[float]:
        return self.eps.expand() if isinstance(self.eps, RangeModel) else list(self.eps)

    def mu_values(self) -> List[int]:
        if self.metric is not None and self.metric.mu:
            return list(self.metric.mu)
        if self.mu:
            return list(self.mu)
        return [int(round(fraction * self.k)) for fraction in self.mu_fraction or []]


@dataclass(frozen=True)
class SweepPoint:
    """One grid point; ``metric`` is None for min-transmission searches."""

    scenario: Scenario
    L: int
    eps: float
    metric: Optional[Metric]
    target: Optional[float]


class ScenarioFileAdapter:
    """Adapter pattern: turns a validated ScenarioFile into domain objects."""

    def adapt(self, document: ScenarioFile) -> List[Scenario]:
        builder = (
            ScenarioBuilder()
            .with_message(document.k)
            .with_scheme(document.scheme.to_scheme())
            .with_clusters([[_to_erasure(d) for d in cluster] for cluster in document.clusters])
            .with_connectivity(document.connectivity)
        )
        low, high = document.transmissions_span()
        return [builder.with_transmissions(n_T).build() for n_T in range(low, high + 1)]

    def metrics(self, document: ScenarioFile) -> List[Metric]:
        out: List[Metric] = []
        for metric in document.metrics:
            out.extend(metric.expand())
        return list(dict.fromkeys(out))


class SweepFileAdapter:
    """Adapter pattern: expands a SweepFile into its grid of SweepPoints."""

    def count(self, document: SweepFile) -> int:
        per_point = len(document.n_T) if document.metric is not None else 1
        if document.metric is not None and document.metric.name == Metric.BASE_PARTIAL:
            per_point *= len(document.mu_values())
        return len(document.schemes) * len(document.L) * len(document.eps_values()) * per_point

    def adapt(self, document: SweepFile) -> List[SweepPoint]:
        points: List[SweepPoint] = []
        metrics = document.metric.expand(document.mu_values()) if document.metric else [None]
        n_T_values = document.n_T if document.metric is not None else [document.k]
        for scheme_model in document.schemes:
            for drones in document.L:
                for eps in document.eps_values():
                    builder = (
                        ScenarioBuilder()
                        .with_message(document.k)
                        .with_scheme(scheme_model.to_scheme())
                        .with_homogeneous_clusters(document.clusters, drones, eps)
                        .with_connectivity(document.connectivity)
                    )
                    for n_T in n_T_values:
                        scenario = builder.with_transmissions(n_T).build()
                        for metric in metrics:
                            points.append(
                                SweepPoint(scenario, drones, eps, metric, document.target)
                            )
        return points


def _to_erasure(drone: Union[float, NakagamiModel]) -> ErasureSpec:
    if isinstance(drone, NakagamiModel):
        return NakagamiLink(m_shape=drone.m, mean_snr=drone.mean_snr, w_m=drone.w_m)
    return float(drone)


def _from_erasure(spec: ErasureSpec) -> Union[float, NakagamiModel]:
    if isinstance(spec, NakagamiLink):
        return NakagamiModel(m=spec.m_shape, mean_snr=spec.mean_snr, w_m=spec.w_m)
    return spec


def format_validation_error(exc: ValidationError) -> str:
    lines = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"])
        message = error["msg"].removeprefix("Value error, ")
        lines.append(f"{location}: {message}" if location else message)
    return "; ".join(lines)


def load_json(path: Union[str, Path]) -> Dict[str, Any]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioParseError(f"{path}: cannot read file ({exc.strerror})") from exc
    return loads_json(text, str(path))


def loads_json(text: str, source: str = "<input>") -> Dict[str, Any]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(
            f"{source}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ScenarioParseError(f"{source}: top level must be a JSON object")
    return data


def parse_scenario(data: Dict[str, Any]) -> ScenarioFile:
    try:
        return ScenarioFile.model_validate(data)
    except ValidationError as exc:
        raise ScenarioValidationError(format_validation_error(exc)) from exc


def parse_sweep(data: Dict[str, Any]) -> SweepFile:
    try:
        return SweepFile.model_validate(data)
    except ValidationError as exc:
        raise ScenarioValidationError(format_validation_error(exc)) from exc


def dump_scenario(document: ScenarioFile) -> str:
    return document.model_dump_json(exclude_none=True, indent=2)


def scenario_from_json(text: str) -> ScenarioFile:
    return parse_scenario(loads_json(text))


def scenario_to_file(
    scenario: Scenario,
    metrics: Optional[List[Metric]] = None,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
) -> ScenarioFile:
    """Inverse of ScenarioFileAdapter.adapt for a single scenario."""
    grouped: Dict[Tuple[str, Optional[int]], List[int]] = {}
    for metric in metrics or [Metric.mission()]:
        grouped.setdefault((metric.name, metric.base), [])
        if metric.mu is not None:
            grouped[(metric.name, metric.base)].append(metric.mu)
    return ScenarioFile(
        k=scenario.k,
        n_T=scenario.n_T,
        scheme=SchemeModel.from_scheme(scenario.scheme),
        clusters=[[_from_erasure(spec) for spec in cluster] for cluster in scenario.clusters],
        connectivity=scenario.connectivity.value,
        metrics=[
            MetricModel(name=name, base=base, mu=mus or None)
            for (name, base), mus in grouped.items()
        ],
        trials=trials,
        seed=seed,
    )


def scenario_to_json(
    scenario: Scenario,
    metrics: Optional[List[Metric]] = None,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
) -> str:
    return dump_scenario(scenario_to_file(scenario, metrics, trials, seed))
