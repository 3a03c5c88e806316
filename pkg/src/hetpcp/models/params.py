"""네트워크 파라미터 모델.

모든 거리는 km, 밀도는 km⁻², 전력은 mW(선형), SIR 임계값 β 는 선형값이다.
dBm/dB 변환은 설정 계층(models.study)에서만 일어난다.

파생 상수 (생성 시 한 번 계산):
  ξ_sm = (P_s/P_m)^(1/α)      정책 P1 의 macro→small 거리 비율
  ξ_ms = 1/ξ_sm
  D    = (P_0/P_s)^(−1/α)     정책 P2 의 SBS 연결 거리 임계값 (P_0 지정 시)
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator

from hetpcp.errors import NumericsDomainError


class Tier(str, Enum):
    MACRO = "macro"
    SMALL = "small"


class AssociationPolicy(str, Enum):
    """P1: 최대 수신전력 연결 / P2: 거리 임계값 D 기반 SBS 우선 연결."""

    P1 = "p1"
    P2 = "p2"


class LaplaceMode(str, Enum):
    """클러스터 내 간섭 Laplace 변환 계산 방식."""

    EXACT = "exact"  # 절단 Poisson 가중 합
    SIMPLIFIED = "simplified"  # exp(−n̄·∫…) 근사


# ─── 단위 변환 ───────────────────────────────────────


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw: float) -> float:
    return 10.0 * math.log10(mw)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


# ─── NetworkParams ───────────────────────────────────


class NetworkParams(BaseModel):
    """2-tier HetNet 파라미터 (불변, 해시 가능)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    lambda_m: float = Field(gt=0, description="MBS 밀도 [km⁻²]")
    lambda_p: float = Field(gt=0, description="클러스터 중심 밀도 [km⁻²]")
    n_s0: int = Field(ge=1, description="대표 클러스터 SBS 수")
    nbar_as: float = Field(ge=0, description="클러스터당 평균 활성 SBS 수")
    sigma_s: float = Field(gt=0, description="SBS 산포 [km]")
    sigma_u: float = Field(gt=0, description="사용자 산포 [km]")
    p_m: float = Field(gt=0, description="MBS 송신 전력 [mW]")
    p_s: float = Field(gt=0, description="SBS 송신 전력 [mW]")
    p_0: float | None = Field(default=None, gt=0, description="P2 임계 전력 [mW]")
    alpha: float = Field(description="경로손실 지수")
    beta: float = Field(gt=0, description="SIR 임계값 (선형)")

    _xi_sm: float = PrivateAttr()
    _distance_threshold: float | None = PrivateAttr(default=None)

    @field_validator("alpha")
    @classmethod
    def alpha_above_two(cls, v: float) -> float:
        if not v > 2:
            raise ValueError("alpha must exceed 2")
        return v

    def model_post_init(self, __context: Any) -> None:
        self._xi_sm = (self.p_s / self.p_m) ** (1.0 / self.alpha)
        if self.p_0 is not None:
            self._distance_threshold = (self.p_0 / self.p_s) ** (-1.0 / self.alpha)

    @property
    def xi_sm(self) -> float:
        return self._xi_sm

    @property
    def xi_ms(self) -> float:
        return 1.0 / self._xi_sm

    @property
    def distance_threshold(self) -> float:
        """정책 P2 의 D [km]."""
        if self._distance_threshold is None:
            raise NumericsDomainError("P_0 가 지정되지 않아 D 를 정의할 수 없습니다")
        return self._distance_threshold

    @property
    def has_distance_threshold(self) -> bool:
        return self._distance_threshold is not None

    @property
    def macro_reach(self) -> float:
        """최근접 MBS 거리의 사실상 상한 √(40/(πλ_m)) — 이 밖 질량은 e⁻⁴⁰."""
        return math.sqrt(40.0 / (math.pi * self.lambda_m))

    def replace(self, **changes: Any) -> NetworkParams:
        """필드를 바꾼 새 인스턴스 (검증과 파생 상수 재계산 포함)."""
        return type(self).model_validate({**self.model_dump(), **changes})

    def with_distance_threshold(self, d: float) -> NetworkParams:
        """D 를 직접 지정 — P_0 = P_s·D^(−α) 로 환산."""
        if not d > 0:
            raise NumericsDomainError(f"D 는 양수여야 합니다: {d!r}")
        return self.replace(p_0=self.p_s * d ** (-self.alpha))

    @classmethod
    def baseline(cls, **overrides: Any) -> NetworkParams:
        """기준 시나리오 — λ_m=1, λ_p=10, n_s0=10, σ=40 m, P_s=23 dBm, P_m=P_s+30 dB, α=4, β=0 dB."""
        p_s = dbm_to_mw(23.0)
        values: dict[str, Any] = {
            "lambda_m": 1.0,
            "lambda_p": 10.0,
            "n_s0": 10,
            "nbar_as": 3.0,
            "sigma_s": 0.04,
            "sigma_u": 0.04,
            "p_m": 1e3 * p_s,
            "p_s": p_s,
            "alpha": 4.0,
            "beta": 1.0,
        }
        values.update(overrides)
        return cls.model_validate(values)
