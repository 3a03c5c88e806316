"""커버리지 결과 모델 — 해석 엔진과 시뮬레이션 엔진이 같은 모양을 돌려준다."""

from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from hetpcp.models.params import AssociationPolicy, LaplaceMode, Tier

_TOTAL_SLACK = 1e-9


class ProvenanceKind(str, Enum):
    ANALYTIC = "analytic"
    SIMULATED = "simulated"


class TierValues(BaseModel):
    model_config = ConfigDict(frozen=True)

    macro: float
    small: float

    def __getitem__(self, tier: Tier) -> float:
        return self.macro if tier is Tier.MACRO else self.small

    @property
    def total(self) -> float:
        return self.macro + self.small


class Provenance(BaseModel):
    """결과 출처 — 해석(모드) 또는 시뮬레이션(시행 수, 95% Wilson 반폭)."""

    model_config = ConfigDict(frozen=True)

    kind: ProvenanceKind
    mode: LaplaceMode | None = None
    trials: int | None = Field(default=None, ge=1)
    seed: int | None = None
    half_width_95: float | None = Field(default=None, ge=0)
    tier_half_width_95: TierValues | None = None


class CoverageReport(BaseModel):
    """한 파라미터 점의 커버리지/연결확률/처리율."""

    model_config = ConfigDict(frozen=True)

    policy: AssociationPolicy
    per_tier_coverage: TierValues
    total_coverage: float
    assoc_prob_avg: TierValues
    throughput: float = Field(ge=0)
    provenance: Provenance

    @model_validator(mode="after")
    def _consistent(self) -> CoverageReport:
        for name, value in (
            ("per_tier_coverage.macro", self.per_tier_coverage.macro),
            ("per_tier_coverage.small", self.per_tier_coverage.small),
            ("total_coverage", self.total_coverage),
        ):
            if not -_TOTAL_SLACK <= value <= 1.0 + _TOTAL_SLACK:
                raise ValueError(f"{name} 가 [0, 1] 밖입니다: {value!r}")
        if self.provenance.kind is ProvenanceKind.ANALYTIC:
            if abs(self.total_coverage - self.per_tier_coverage.total) > _TOTAL_SLACK:
                raise ValueError("해석 결과의 total_coverage 는 tier 합과 같아야 합니다")
        return self

    def coverage(self, tier: Tier | None = None) -> float:
        return self.total_coverage if tier is None else self.per_tier_coverage[tier]

    def summary(self) -> dict[str, float | str]:
        """CLI 표/로그용 평탄화."""
        return {
            "policy": self.policy.value,
            "provenance": self.provenance.kind.value,
            "coverage_macro": self.per_tier_coverage.macro,
            "coverage_small": self.per_tier_coverage.small,
            "coverage_total": self.total_coverage,
            "assoc_macro": self.assoc_prob_avg.macro,
            "assoc_small": self.assoc_prob_avg.small,
            "throughput": self.throughput,
        }
