"""YAML 스터디 스키마 — 네트워크/스윕/시뮬레이션/해석 설정과 실행 매니페스트.

  apiVersion: hetpcp/v1
  kind: Study
  metadata: {name, description, figure, tags}
  spec:
    network:    단위가 키 이름에 붙는다 (…_km, …_dbm, …_db). 선형값 키(…_mw, beta_linear)도 허용
    sweep:      variable + values | grid, series, engines, policy
    simulation: SimConfig
    analysis:   CoverageOptions

dump 는 전력을 mW, β 를 선형값으로 기록하므로 load → dump → load 결과가 같다.
"""

from __future__ import annotations

from collections.abc import Callable
from enum import Enum
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from hetpcp.analysis.coverage import CoverageOptions
from hetpcp.models.params import (
    AssociationPolicy,
    NetworkParams,
    db_to_linear,
    dbm_to_mw,
    linear_to_db,
)
from hetpcp.models.report import CoverageReport
from hetpcp.simulation.sampler import SimConfig

API_VERSION = "hetpcp/v1"


class ResourceKind(str, Enum):
    STUDY = "Study"
    RUN_MANIFEST = "RunManifest"


# ─── network ─────────────────────────────────────────


def _resolve_unit(
    name: str,
    log_value: float | None,
    linear_value: float | None,
    convert: Callable[[float], float],
    default: float | None,
) -> float | None:
    if log_value is not None and linear_value is not None:
        raise ValueError(f"{name}: 로그 단위 키와 선형 키 중 하나만 지정하세요")
    if linear_value is not None:
        return linear_value
    if log_value is not None:
        return convert(log_value)
    return default


class NetworkSection(BaseModel):
    """spec.network — 기본값은 기준 시나리오 (P_s = 23 dBm, P_m = P_s + 30 dB)."""

    model_config = ConfigDict(extra="forbid")

    lambda_m_per_km2: float = Field(default=1.0, gt=0)
    lambda_p_per_km2: float = Field(default=10.0, gt=0)
    n_s0: int = Field(default=10, ge=1)
    nbar_as: float = Field(default=3.0, ge=0)
    sigma_s_km: float = Field(default=0.04, gt=0)
    sigma_u_km: float | None = Field(default=None, gt=0)  # 미지정 시 σ_s
    p_s_dbm: float | None = None
    p_s_mw: float | None = Field(default=None, gt=0)
    p_m_dbm: float | None = None
    p_m_mw: float | None = Field(default=None, gt=0)
    p_0_dbm: float | None = None
    p_0_mw: float | None = Field(default=None, gt=0)
    distance_threshold_km: float | None = Field(default=None, gt=0)
    alpha: float = 4.0
    beta_db: float | None = None
    beta_linear: float | None = Field(default=None, gt=0)

    @field_validator("alpha")
    @classmethod
    def alpha_above_two(cls, v: float) -> float:
        if not v > 2:
            raise ValueError("alpha must exceed 2")
        return v

    @model_validator(mode="after")
    def _exclusive_units(self) -> NetworkSection:
        thresholds = [self.p_0_dbm, self.p_0_mw, self.distance_threshold_km]
        if sum(v is not None for v in thresholds) > 1:
            raise ValueError("p_0_dbm / p_0_mw / distance_threshold_km 중 하나만 지정하세요")
        self.to_params()
        return self

    def to_params(self) -> NetworkParams:
        p_s = _resolve_unit("p_s", self.p_s_dbm, self.p_s_mw, dbm_to_mw, dbm_to_mw(23.0))
        p_m = _resolve_unit("p_m", self.p_m_dbm, self.p_m_mw, dbm_to_mw, 1e3 * p_s)
        p_0 = _resolve_unit("p_0", self.p_0_dbm, self.p_0_mw, dbm_to_mw, None)
        beta = _resolve_unit("beta", self.beta_db, self.beta_linear, db_to_linear, 1.0)
        params = NetworkParams(
            lambda_m=self.lambda_m_per_km2,
            lambda_p=self.lambda_p_per_km2,
            n_s0=self.n_s0,
            nbar_as=self.nbar_as,
            sigma_s=self.sigma_s_km,
            sigma_u=self.sigma_u_km if self.sigma_u_km is not None else self.sigma_s_km,
            p_m=p_m,
            p_s=p_s,
            p_0=p_0,
            alpha=self.alpha,
            beta=beta,
        )
        if self.distance_threshold_km is not None:
            params = params.with_distance_threshold(self.distance_threshold_km)
        return params

    @classmethod
    def from_params(cls, params: NetworkParams) -> NetworkSection:
        """선형 단위 키로 직렬화 (무손실)."""
        return cls(
            lambda_m_per_km2=params.lambda_m,
            lambda_p_per_km2=params.lambda_p,
            n_s0=params.n_s0,
            nbar_as=params.nbar_as,
            sigma_s_km=params.sigma_s,
            sigma_u_km=params.sigma_u,
            p_s_mw=params.p_s,
            p_m_mw=params.p_m,
            p_0_mw=params.p_0,
            alpha=params.alpha,
            beta_linear=params.beta,
        )


# ─── sweep ───────────────────────────────────────────


class SweepVariable(str, Enum):
    NBAR_AS = "nbar_as"
    SIGMA_S = "sigma_s"  # km
    D = "D"  # km, P_0 = P_s·D^(−α)
    BETA = "beta"  # dB
    N_S0 = "n_s0"


class EngineKind(str, Enum):
    ANALYTIC = "analytic"
    SIMULATION = "simulation"


class PolicySelection(str, Enum):
    P1 = "p1"
    P2 = "p2"
    BOTH = "both"

    def policies(self) -> list[AssociationPolicy]:
        if self is PolicySelection.BOTH:
            return [AssociationPolicy.P1, AssociationPolicy.P2]
        return [AssociationPolicy(self.value)]


class GridSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    start: float
    stop: float
    count: int = Field(ge=1)
    spacing: Literal["linear", "log"] = "linear"

    def values(self) -> list[float]:
        if self.spacing == "log":
            return [float(v) for v in np.geomspace(self.start, self.stop, self.count)]
        return [float(v) for v in np.linspace(self.start, self.stop, self.count)]


class SeriesSpec(BaseModel):
    """곡선 묶음 — 같은 스윕을 series 값마다 반복."""

    model_config = ConfigDict(extra="forbid")

    variable: SweepVariable
    values: list[float] = Field(min_length=1)


class SweepSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    variable: SweepVariable = SweepVariable.NBAR_AS
    values: list[float] | None = None
    grid: GridSpec | None = None
    couple_sigma_u: bool = True  # σ_s 를 바꿀 때 σ_u 도 같이
    series: SeriesSpec | None = None
    engines: list[EngineKind] = Field(default_factory=lambda: [EngineKind.ANALYTIC], min_length=1)
    policy: PolicySelection = PolicySelection.P1

    @model_validator(mode="after")
    def _values_or_grid(self) -> SweepSpec:
        if self.values is not None and self.grid is not None:
            raise ValueError("sweep.values 와 sweep.grid 중 하나만 지정하세요")
        if self.values is not None and not self.values:
            raise ValueError("sweep.values 가 비어 있습니다")
        return self

    def resolved_values(self, params: NetworkParams) -> list[float]:
        """스윕 값 목록. values/grid 가 없으면 현재 params 값 한 점."""
        if self.values is not None:
            return list(self.values)
        if self.grid is not None:
            return self.grid.values()
        return [current_value(params, self.variable)]


def current_value(params: NetworkParams, variable: SweepVariable) -> float:
    match variable:
        case SweepVariable.NBAR_AS:
            return params.nbar_as
        case SweepVariable.SIGMA_S:
            return params.sigma_s
        case SweepVariable.D:
            return params.distance_threshold
        case SweepVariable.BETA:
            return linear_to_db(params.beta)
        case SweepVariable.N_S0:
            return float(params.n_s0)
    raise ValueError(f"지원하지 않는 스윕 변수: {variable!r}")


def apply_sweep_value(
    params: NetworkParams, variable: SweepVariable, value: float, *, couple_sigma_u: bool = True
) -> NetworkParams:
    """스윕 변수 하나를 바꾼 params."""
    match variable:
        case SweepVariable.NBAR_AS:
            return params.replace(nbar_as=value)
        case SweepVariable.SIGMA_S:
            if couple_sigma_u:
                return params.replace(sigma_s=value, sigma_u=value)
            return params.replace(sigma_s=value)
        case SweepVariable.D:
            return params.with_distance_threshold(value)
        case SweepVariable.BETA:
            return params.replace(beta=db_to_linear(value))
        case SweepVariable.N_S0:
            if value != int(value):
                raise ValueError(f"n_s0 는 정수여야 합니다: {value!r}")
            return params.replace(n_s0=int(value))
    raise ValueError(f"지원하지 않는 스윕 변수: {variable!r}")


# ─── 매니페스트 ──────────────────────────────────────


class StudyMetadata(BaseModel):
    name: str
    description: str = ""
    figure: str | None = None  # 이 스터디가 재현하는 그림 ID (fig2 …)
    tags: list[str] = Field(default_factory=list)


class StudySpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    network: NetworkSection = Field(default_factory=NetworkSection)
    sweep: SweepSpec = Field(default_factory=SweepSpec)
    simulation: SimConfig = Field(default_factory=SimConfig)
    analysis: CoverageOptions = Field(default_factory=CoverageOptions)


class StudyManifest(BaseModel):
    """스터디 YAML 스키마 (resources/studies/*.yaml)."""

    model_config = ConfigDict(extra="forbid")

    apiVersion: str = API_VERSION  # noqa: N815
    kind: Literal[ResourceKind.STUDY] = ResourceKind.STUDY
    metadata: StudyMetadata
    spec: StudySpec = Field(default_factory=StudySpec)

    # 파싱 후 주입되는 메타 — YAML에는 없음
    source_path: str | None = Field(default=None, exclude=True)

    @field_validator("apiVersion")
    @classmethod
    def supported_version(cls, v: str) -> str:
        if v != API_VERSION:
            raise ValueError(f"지원하지 않는 apiVersion '{v}' (지원: {API_VERSION})")
        return v


# ─── 실행 결과 ───────────────────────────────────────


class EngineResult(BaseModel):
    """한 점에서 (엔진, 정책) 한 조합의 결과."""

    engine: EngineKind
    policy: AssociationPolicy
    status: Literal["ok", "error"] = "ok"
    error: str | None = None
    report: CoverageReport | None = None
    duration_ms: int = 0


class PointResult(BaseModel):
    index: int
    sweep_value: float
    series_value: float | None = None
    point_seed: int
    results: list[EngineResult] = Field(default_factory=list)

    @property
    def success(self) -> bool:
        return all(r.status == "ok" for r in self.results)


class RunManifest(BaseModel):
    """스윕 실행 기록 — 설정 스냅샷, 시드, 버전, 소요 시간, 점별 결과."""

    apiVersion: str = API_VERSION  # noqa: N815
    kind: Literal[ResourceKind.RUN_MANIFEST] = ResourceKind.RUN_MANIFEST
    study: dict[str, Any]
    library_version: str
    seed: int
    started_at: str
    wall_clock_seconds: float = 0.0
    csv_file: str | None = None
    points: list[PointResult] = Field(default_factory=list)

    @property
    def success(self) -> bool:
        return all(p.success for p in self.points)

    def study_manifest(self) -> StudyManifest:
        """스냅샷에서 스터디를 복원 (--from-manifest 재실행용)."""
        return StudyManifest.model_validate(self.study)
