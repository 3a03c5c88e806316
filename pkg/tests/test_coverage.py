"""커버리지/처리율 해석 파이프라인 테스트.

무거운 적분은 @pytest.mark.slow 로 표시하고 축소 설정(FAST_OPTIONS)을 쓴다.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from hetpcp.analysis.coverage import (
    CoverageOptions,
    OuterRule,
    coverage,
    coverage_policy1,
    coverage_policy2,
    optimal_threshold,
    outer_rule_nodes,
    throughput,
)
from hetpcp.errors import NumericsDomainError
from hetpcp.geometry.kernel import ClusterKernel
from hetpcp.models.params import AssociationPolicy, LaplaceMode, NetworkParams, Tier
from hetpcp.models.report import ProvenanceKind
from tests.helpers import FAST_OPTIONS

SINGLE_TIER = 1.0 / (1.0 + math.pi / 4.0)


class TestThroughput:
    """throughput() 산식."""

    def test_산식(self) -> None:
        """(λ_m·P_cm + λ_p·n̄·P_cs)·log2(1+β) = (0.5 + 10·3·0.4)·1."""
        p = NetworkParams.baseline()
        assert throughput(p, 0.5, 0.4, AssociationPolicy.P1) == pytest.approx(12.5)

    def test_beta_반영(self) -> None:
        p = NetworkParams.baseline(beta=3.0)
        assert throughput(p, 0.5, 0.0, AssociationPolicy.P2) == pytest.approx(0.5 * 2.0)

    def test_범위_밖_거부(self) -> None:
        with pytest.raises(NumericsDomainError):
            throughput(NetworkParams.baseline(), 1.5, 0.0, AssociationPolicy.P1)


class TestOuterRule:
    """ν0 외부 규칙."""

    def test_gaussian_가중치_합(self) -> None:
        nodes, weights = outer_rule_nodes(ClusterKernel.gaussian(0.04), 32)
        assert weights.sum() == pytest.approx(1.0, rel=1e-12)
        assert (nodes > 0).all()

    def test_gaussian_평균(self) -> None:
        """E[V0] = σ√(π/2)."""
        nodes, weights = outer_rule_nodes(ClusterKernel.gaussian(0.04), 32)
        assert float(np.dot(weights, nodes)) == pytest.approx(0.04 * math.sqrt(math.pi / 2))

    def test_custom_가중치_합(self) -> None:
        sigma = 0.04

        def pdf_2d(y1: float, y2: float) -> float:
            return math.exp(-(y1 * y1 + y2 * y2) / (2 * sigma**2)) / (2 * math.pi * sigma**2)

        custom = ClusterKernel.custom(pdf_2d, scale=sigma, support_radius=12 * sigma)
        _, weights = outer_rule_nodes(custom, 64)
        assert weights.sum() == pytest.approx(1.0, abs=1e-8)


class TestCoverageContract:
    """빠른 전제조건 검사."""

    def test_P2_는_P0_필요(self) -> None:
        p = NetworkParams.baseline()
        with pytest.raises(NumericsDomainError):
            coverage_policy2(p, ClusterKernel.gaussian(p.sigma_s), options=FAST_OPTIONS)

    def test_optimal_threshold_빈_격자(self, params: NetworkParams, kernel: ClusterKernel) -> None:
        with pytest.raises(NumericsDomainError):
            optimal_threshold(params, kernel, [])

    def test_optimal_threshold_비증가_격자(
        self, params: NetworkParams, kernel: ClusterKernel
    ) -> None:
        with pytest.raises(NumericsDomainError):
            optimal_threshold(params, kernel, [0.1, 0.05])


@pytest.mark.slow
class TestCoverageValues:
    """해석 커버리지 값 — 극한과 정성적 성질."""

    def test_beta_0_극한(self, params: NetworkParams, kernel: ClusterKernel) -> None:
        """β → 0 이면 총 커버리지 → 1 (연결 확률 합)."""
        p = params.replace(beta=1e-12)
        for policy in AssociationPolicy:
            report = coverage(p, kernel, policy, options=FAST_OPTIONS)
            assert report.total_coverage == pytest.approx(1.0, abs=1e-4)

    def test_단일_tier_PPP_환원(self) -> None:
        """P_s → 0, n̄ → 0 이면 1/(1 + π/4)."""
        base = NetworkParams.baseline(nbar_as=0.0)
        p = base.replace(p_s=base.p_m * 1e-16)
        report = coverage_policy1(p, ClusterKernel.gaussian(p.sigma_s), options=FAST_OPTIONS)
        assert report.total_coverage == pytest.approx(SINGLE_TIER, abs=1e-3)
        assert report.per_tier_coverage.small == pytest.approx(0.0, abs=1e-4)

    def test_리포트_형태(self, params: NetworkParams, kernel: ClusterKernel) -> None:
        report = coverage_policy1(params, kernel, options=FAST_OPTIONS)
        assert report.provenance.kind is ProvenanceKind.ANALYTIC
        assert report.provenance.mode is LaplaceMode.SIMPLIFIED
        assert report.total_coverage == pytest.approx(report.per_tier_coverage.total)
        assert report.assoc_prob_avg.total == pytest.approx(1.0, abs=1e-6)
        assert 0.0 < report.coverage(Tier.SMALL) < report.assoc_prob_avg.small
        assert report.throughput == pytest.approx(
            throughput(params, report.coverage(Tier.MACRO), report.coverage(Tier.SMALL),
                       AssociationPolicy.P1)
        )

    @pytest.mark.parametrize("policy", list(AssociationPolicy))
    def test_nbar_증가_트레이드오프(
        self, params: NetworkParams, kernel: ClusterKernel, policy: AssociationPolicy
    ) -> None:
        """n̄ 1 → 4 → 7: 커버리지 비증가, 처리율 비감소."""
        reports = [
            coverage(params.replace(nbar_as=n), kernel, policy, options=FAST_OPTIONS)
            for n in (1.0, 4.0, 7.0)
        ]
        cov = [r.total_coverage for r in reports]
        thr = [r.throughput for r in reports]
        assert cov[0] >= cov[1] >= cov[2]
        assert thr[0] <= thr[1] <= thr[2]

    @pytest.mark.parametrize("policy", list(AssociationPolicy))
    def test_sigma_s_증가_tier_트레이드오프(
        self, params: NetworkParams, policy: AssociationPolicy
    ) -> None:
        """σ_s = σ_u 가 커지면 Pcm 은 증가, Pcs 는 감소 (격자 4 점)."""
        reports = [
            coverage(
                params.replace(sigma_s=s, sigma_u=s),
                ClusterKernel.gaussian(s),
                policy,
                options=FAST_OPTIONS,
            )
            for s in (0.02, 0.04, 0.06, 0.08)
        ]
        macro = [r.per_tier_coverage.macro for r in reports]
        small = [r.per_tier_coverage.small for r in reports]
        assert all(a < b for a, b in zip(macro, macro[1:]))
        assert all(a > b for a, b in zip(small, small[1:]))

    def test_exact_simplified_작은_nbar(self, kernel: ClusterKernel) -> None:
        """n̄ ≤ n_s0/3 에서 두 모드의 커버리지 차이 ≤ 0.01."""
        p = NetworkParams.baseline(nbar_as=2.0)
        exact = coverage_policy1(p, kernel, LaplaceMode.EXACT, options=FAST_OPTIONS)
        simple = coverage_policy1(p, kernel, LaplaceMode.SIMPLIFIED, options=FAST_OPTIONS)
        assert exact.provenance.mode is LaplaceMode.EXACT
        assert abs(exact.total_coverage - simple.total_coverage) <= 0.01

    def test_정책_우위(self, params: NetworkParams, kernel: ClusterKernel) -> None:
        p1 = coverage_policy1(params, kernel, options=FAST_OPTIONS)
        p2 = coverage_policy2(params, kernel, options=FAST_OPTIONS)
        assert p1.total_coverage >= p2.total_coverage - 0.005

    def test_외부_노드_수렴(self, params: NetworkParams, kernel: ClusterKernel) -> None:
        """외부 노드 12 와 48 의 결과 차이가 작다."""
        fine = CoverageOptions(outer_nodes=48, inter_cache_nodes=48)
        a = coverage_policy1(params, kernel, options=FAST_OPTIONS)
        b = coverage_policy1(params, kernel, options=fine)
        assert a.total_coverage == pytest.approx(b.total_coverage, abs=2e-3)

    def test_적응형_외부_규칙(self, params: NetworkParams, kernel: ClusterKernel) -> None:
        adaptive = CoverageOptions(outer_rule=OuterRule.ADAPTIVE, inter_cache_nodes=48)
        fixed = CoverageOptions(outer_nodes=48, inter_cache_nodes=48)
        a = coverage_policy2(params, kernel, options=adaptive)
        b = coverage_policy2(params, kernel, options=fixed)
        assert a.total_coverage == pytest.approx(b.total_coverage, abs=2e-3)

    def test_worker_수_무관(self, params: NetworkParams, kernel: ClusterKernel) -> None:
        """외부 노드 병렬 평가는 같은 비트를 낸다."""
        parallel = FAST_OPTIONS.model_copy(update={"workers": 3})
        a = coverage_policy1(params, kernel, options=FAST_OPTIONS)
        b = coverage_policy1(params, kernel, options=parallel)
        assert a.total_coverage == b.total_coverage

    def test_최적_임계값_내부(self, kernel: ClusterKernel) -> None:
        """D = 0.09 km 가 양 끝(5 m, 1 km)보다 좋고, D* 는 격자 내부."""
        p = NetworkParams.baseline()
        grid = [0.005, 0.03, 0.09, 0.25, 1.0]
        values = [
            coverage_policy2(p.with_distance_threshold(d), kernel, options=FAST_OPTIONS)
            .total_coverage
            for d in grid
        ]
        assert values[2] > values[0]
        assert values[2] > values[-1]
        d_star, c_star = optimal_threshold(p, kernel, grid, options=FAST_OPTIONS)
        assert grid[0] < d_star < grid[-1]
        assert c_star >= max(values) - 1e-12

    def test_최적_임계값_nbar_증가에_감소(self, kernel: ClusterKernel) -> None:
        """n̄ 1 → 7 에서 D* 는 커지지 않는다."""
        grid = [0.005, 0.03, 0.09, 0.25, 1.0]
        d_low, _ = optimal_threshold(
            NetworkParams.baseline(nbar_as=1.0), kernel, grid, options=FAST_OPTIONS
        )
        d_high, _ = optimal_threshold(
            NetworkParams.baseline(nbar_as=7.0), kernel, grid, options=FAST_OPTIONS
        )
        assert d_high <= d_low + 2e-3
