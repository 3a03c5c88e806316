"""공유 테스트 헬퍼 — 샘플 YAML 데이터 + Mock 엔진."""

from __future__ import annotations

from pathlib import Path

from hetpcp.analysis.coverage import CoverageOptions
from hetpcp.engines.base import CoverageEngine, EvaluationRequest
from hetpcp.engines.registry import EngineRegistry
from hetpcp.models.params import LaplaceMode, Tier
from hetpcp.models.report import CoverageReport, Provenance, ProvenanceKind, TierValues

# 테스트용 가벼운 해석 설정 (외부 노드/캐시 축소)
FAST_OPTIONS = CoverageOptions(outer_nodes=12, inter_cache_nodes=48)


# ─── Mock Engine ──────────────────────────────────────


class MockEngine(CoverageEngine):
    """테스트용 Mock 엔진 — 구적/시뮬레이션 없이 n̄ 에 따라 정해진 값을 반환."""

    def __init__(self, fail_above: float | None = None) -> None:
        self.fail_above = fail_above
        self.calls: list[EvaluationRequest] = []

    @property
    def name(self) -> str:
        return "mock"

    def evaluate(self, request: EvaluationRequest) -> CoverageReport:
        self.calls.append(request)
        nbar = request.params.nbar_as
        if self.fail_above is not None and nbar > self.fail_above:
            raise RuntimeError(f"mock failure at nbar={nbar}")
        macro = 0.5 / (1.0 + nbar)
        small = 0.25
        return CoverageReport(
            policy=request.policy,
            per_tier_coverage=TierValues(macro=macro, small=small),
            total_coverage=macro + small,
            assoc_prob_avg=TierValues(macro=0.6, small=0.4),
            throughput=request.params.lambda_m * macro + request.params.lambda_p * nbar * small,
            provenance=Provenance(kind=ProvenanceKind.ANALYTIC, mode=LaplaceMode.SIMPLIFIED),
        )


def mock_registry(fail_above: float | None = None) -> EngineRegistry:
    """analytic 이름으로 MockEngine 을 등록한 레지스트리."""
    registry = EngineRegistry()
    registry.register("analytic", MockEngine(fail_above))
    return registry


def tier_value(report: CoverageReport, tier: Tier) -> float:
    return report.per_tier_coverage[tier]


# ─── 샘플 YAML ────────────────────────────────────────

SAMPLE_STUDY_YAML = """\
apiVersion: hetpcp/v1
kind: Study
metadata:
  name: test-study
  description: "테스트 스터디"
  tags: [test]
spec:
  network:
    lambda_m_per_km2: 1.0
    lambda_p_per_km2: 10.0
    n_s0: 10
    nbar_as: 3.0
    sigma_s_km: 0.04
    p_s_dbm: 23.0
    distance_threshold_km: 0.08
    alpha: 4.0
    beta_db: 0.0
  sweep:
    variable: nbar_as
    values: [1.0, 2.0, 3.0]
    engines: [analytic]
    policy: p1
  simulation:
    trials: 2000
    seed: 42
    batch_size: 500
"""

SAMPLE_SERIES_YAML = """\
apiVersion: hetpcp/v1
kind: Study
metadata:
  name: series-study
spec:
  network:
    distance_threshold_km: 0.08
  sweep:
    variable: nbar_as
    values: [1.0, 4.0]
    series:
      variable: sigma_s
      values: [0.02, 0.04]
    engines: [analytic]
    policy: both
"""

MINIMAL_STUDY_YAML = """\
apiVersion: hetpcp/v1
kind: Study
metadata:
  name: minimal
"""

UNKNOWN_KEY_YAML = """\
apiVersion: hetpcp/v1
kind: Study
metadata:
  name: unknown-key
spec:
  network:
    nbar_as: 3.0
    lamda_m_per_km2: 1.0
"""

BAD_ALPHA_YAML = """\
apiVersion: hetpcp/v1
kind: Study
metadata:
  name: bad-alpha
spec:
  network:
    alpha: 2.0
"""


def write_yaml(path: Path, content: str) -> Path:
    """YAML 파일 생성 (디렉토리 자동 생성)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8")
    return path
