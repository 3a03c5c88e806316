"""간섭 Laplace 변환 테스트 — 폐형식, 모드 비교, 캐시, 경험 평균."""

from __future__ import annotations

import math

import numpy as np
import pytest

from hetpcp.analysis.laplace import (
    EXACT_MODE_MAX_CLUSTER,
    TRUNCATION_RATIO,
    InterLaplaceCache,
    LaplaceContext,
    OuterTail,
    inter_truncation_cut,
    intercluster_kernel_mean,
    laplace_inter,
    laplace_intra,
    laplace_macro,
    scaled_macro_tail,
)
from hetpcp.errors import NumericsDomainError
from hetpcp.geometry.kernel import ClusterKernel
from hetpcp.models.params import AssociationPolicy, LaplaceMode, NetworkParams, Tier
from hetpcp.numerics.quadrature import integrate
from hetpcp.simulation.engine import estimate_laplace_inter, estimate_laplace_intra


def macro_tail_alpha4(a: float) -> float:
    """α = 4 에서 ∫_a^∞ v/(1+v⁴) dv = (π/2 − arctan a²)/2."""
    return 0.5 * (0.5 * math.pi - math.atan(a * a))


class TestLaplaceMacro:
    """MBS 간섭."""

    def test_s_0(self, params: NetworkParams) -> None:
        for policy in AssociationPolicy:
            for tier in Tier:
                assert laplace_macro(params, policy, tier, 0.0, 0.1) == 1.0

    def test_scaled_tail_0(self) -> None:
        """∫_0^∞ v/(1+v^α) dv = (π/α)/sin(2π/α)."""
        assert scaled_macro_tail(0.0, 4.0) == pytest.approx(math.pi / 4, rel=1e-14)
        assert scaled_macro_tail(0.0, 3.0) == pytest.approx(
            (math.pi / 3) / math.sin(2 * math.pi / 3), rel=1e-14
        )

    @pytest.mark.parametrize("a", [0.05, 0.5, 2.0, 10.0])
    def test_scaled_tail_폐형식(self, a: float) -> None:
        assert scaled_macro_tail(a, 4.0) == pytest.approx(macro_tail_alpha4(a), rel=1e-10)

    @pytest.mark.parametrize(
        ("policy", "tier"),
        [
            (AssociationPolicy.P1, Tier.MACRO),
            (AssociationPolicy.P1, Tier.SMALL),
            (AssociationPolicy.P2, Tier.MACRO),
            (AssociationPolicy.P2, Tier.SMALL),
        ],
    )
    def test_폐형식_alpha4(
        self, params: NetworkParams, policy: AssociationPolicy, tier: Tier
    ) -> None:
        """exp(−2πλ_m √(sP_m) · tail(lower/(sP_m)^(1/4)))."""
        s, x = 3e-7, 0.2
        sp = s * params.p_m
        if policy is AssociationPolicy.P2 and tier is Tier.SMALL:
            lower = 0.0
        else:
            lower = x if tier is Tier.MACRO else params.xi_ms * x
        expected = math.exp(
            -2 * math.pi * params.lambda_m * math.sqrt(sp) * macro_tail_alpha4(lower / sp**0.25)
        )
        assert laplace_macro(params, policy, tier, s, x) == pytest.approx(expected, rel=1e-9)

    def test_x_필요(self, params: NetworkParams) -> None:
        with pytest.raises(NumericsDomainError):
            laplace_macro(params, AssociationPolicy.P1, Tier.MACRO, 1e-6)

    def test_PPP_단일_tier_커버리지(self) -> None:
        """β = 1, α = 4 에서 ∫ f_Rm(x) L_macro(x⁴/P_m) dx = 1/(1 + π/4)."""
        p = NetworkParams.baseline()
        lam = p.lambda_m

        def integrand(x: float) -> float:
            s = x**4 / p.p_m
            pdf = 2 * math.pi * lam * x * math.exp(-math.pi * lam * x * x)
            return pdf * laplace_macro(p, AssociationPolicy.P1, Tier.MACRO, s, x)

        value = integrate(integrand, 0.0, p.macro_reach, points=(0.5,))
        assert value == pytest.approx(1.0 / (1.0 + math.pi / 4), rel=1e-8)


class TestLaplaceIntra:
    """대표 클러스터 내 간섭."""

    def _ctx(self, params: NetworkParams, kernel: ClusterKernel, tier: Tier, mode: LaplaceMode):
        return LaplaceContext(params, kernel, AssociationPolicy.P1, tier, 0.04, 0.03, mode)

    @pytest.mark.parametrize("mode", list(LaplaceMode))
    def test_s_0_은_1(self, params: NetworkParams, kernel: ClusterKernel, mode) -> None:
        assert laplace_intra(self._ctx(params, kernel, Tier.SMALL, mode), 0.0) == 1.0

    def test_nbar_0_은_1(self, kernel: ClusterKernel) -> None:
        p = NetworkParams.baseline(nbar_as=0.0)
        ctx = self._ctx(p, kernel, Tier.MACRO, LaplaceMode.EXACT)
        assert laplace_intra(ctx, 1e-6) == 1.0

    @pytest.mark.parametrize("tier", list(Tier))
    def test_단조_감소(self, params: NetworkParams, kernel: ClusterKernel, tier: Tier) -> None:
        ctx = self._ctx(params, kernel, tier, LaplaceMode.EXACT)
        values = [laplace_intra(ctx, s) for s in np.geomspace(1e-10, 1e-4, 8)]
        assert all(0.0 < v <= 1.0 for v in values)
        assert all(a >= b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("tier", list(Tier))
    def test_exact_simplified_작은_nbar(self, kernel: ClusterKernel, tier: Tier) -> None:
        """n̄ = 1 ≤ n_s0/3 에서 두 모드의 차이는 절단 질량 수준."""
        p = NetworkParams.baseline(nbar_as=1.0)
        for s in (1e-8, 1e-6, 1e-5):
            exact = laplace_intra(self._ctx(p, kernel, tier, LaplaceMode.EXACT), s)
            simple = laplace_intra(self._ctx(p, kernel, tier, LaplaceMode.SIMPLIFIED), s)
            assert exact == pytest.approx(simple, abs=1e-5)

    def test_exact_모드_클러스터_상한(self, kernel: ClusterKernel) -> None:
        p = NetworkParams.baseline(n_s0=EXACT_MODE_MAX_CLUSTER + 1)
        with pytest.raises(NumericsDomainError):
            self._ctx(p, kernel, Tier.MACRO, LaplaceMode.EXACT)

    def test_퇴화_조건은_1(self, params: NetworkParams, kernel: ClusterKernel) -> None:
        """배제 반경이 커널 창 밖이면 간섭원이 없다."""
        ctx = LaplaceContext(
            params, kernel, AssociationPolicy.P1, Tier.SMALL, 0.0, 1.0, LaplaceMode.EXACT
        )
        assert laplace_intra(ctx, 1e-6) == 1.0

    @pytest.mark.slow
    @pytest.mark.parametrize(
        ("policy", "tier"),
        [
            (AssociationPolicy.P1, Tier.MACRO),
            (AssociationPolicy.P1, Tier.SMALL),
            (AssociationPolicy.P2, Tier.MACRO),
            (AssociationPolicy.P2, Tier.SMALL),
        ],
    )
    def test_경험_평균_일치(
        self, params: NetworkParams, kernel: ClusterKernel, policy, tier
    ) -> None:
        """s 격자 10 점에서 exact 모드와 경험 평균이 4 표준오차 이내."""
        rng = np.random.default_rng(2024)
        nu0, x = 0.03, 0.05
        ctx = LaplaceContext(params, kernel, policy, tier, nu0, x, LaplaceMode.EXACT)
        for s in np.geomspace(1e-9, 1e-4, 10):
            mean, se = estimate_laplace_intra(
                params, kernel, policy, tier, nu0, x, float(s), 20_000, rng
            )
            assert abs(laplace_intra(ctx, float(s)) - mean) <= 4 * se + 1e-12


class TestLaplaceInter:
    """다른 클러스터 간섭."""

    def test_s_0(self, params: NetworkParams, kernel: ClusterKernel) -> None:
        assert laplace_inter(params, kernel, 0.0) == 1.0

    def test_꼬리_처리_일치(self, params: NetworkParams, kernel: ClusterKernel) -> None:
        """치환 꼬리와 절단 + 원거리 꼬리가 같은 값을 준다."""
        for s in (1e-8, 1e-6):
            a = laplace_inter(params, kernel, s, tail=OuterTail.SUBSTITUTION)
            b = laplace_inter(params, kernel, s, tail=OuterTail.TRUNCATED)
            assert a == pytest.approx(b, rel=1e-6)

    def test_꼬리_처리_일치_alpha_3(self, params: NetworkParams, kernel: ClusterKernel) -> None:
        p = params.replace(alpha=3.0)
        a = laplace_inter(p, kernel, 1e-6, tail=OuterTail.SUBSTITUTION)
        b = laplace_inter(p, kernel, 1e-6, tail=OuterTail.TRUNCATED)
        assert a == pytest.approx(b, rel=1e-6)

    def test_절단점_규칙(self, params: NetworkParams, kernel: ClusterKernel) -> None:
        """절단 ν 에서 피적분 함수는 최댓값의 1e-12 아래, 한 단계 앞에서는 아직 위."""
        s = 1e-6
        sp = s * params.p_s

        def outer(nu: float) -> float:
            mean = intercluster_kernel_mean(kernel, nu, sp, params.alpha)
            return -math.expm1(-params.nbar_as * mean) * nu

        cut, breaks = inter_truncation_cut(params, kernel, s)
        start = breaks[3]
        peak = max(outer(float(nu)) for nu in np.geomspace(1e-4 * start, start, 64))

        assert cut > start
        assert outer(cut) < TRUNCATION_RATIO * peak
        assert outer(cut / 2.0) >= TRUNCATION_RATIO * peak
        assert breaks[-1] == cut

    def test_nbar_증가에_감소(self, kernel: ClusterKernel) -> None:
        low = laplace_inter(NetworkParams.baseline(nbar_as=1.0), kernel, 1e-6)
        high = laplace_inter(NetworkParams.baseline(nbar_as=5.0), kernel, 1e-6)
        assert 0.0 < high < low < 1.0

    @pytest.mark.slow
    def test_캐시_직접계산_일치(self, params: NetworkParams, kernel: ClusterKernel) -> None:
        cache = InterLaplaceCache(params, kernel, 1e-10, 1e-5, nodes=256)
        for s in np.geomspace(1.3e-10, 0.9e-5, 7):
            direct = laplace_inter(params, kernel, float(s))
            assert cache(float(s)) == pytest.approx(direct, rel=1e-4)

    def test_캐시_범위_밖은_직접계산(self, params: NetworkParams, kernel: ClusterKernel) -> None:
        cache = InterLaplaceCache(params, kernel, 1e-9, 1e-8, nodes=16)
        assert cache(1e-6) == laplace_inter(params, kernel, 1e-6)
        assert cache(0.0) == 1.0

    def test_캐시_범위_검증(self, params: NetworkParams, kernel: ClusterKernel) -> None:
        with pytest.raises(NumericsDomainError):
            InterLaplaceCache(params, kernel, 1e-5, 1e-6)

    @pytest.mark.slow
    def test_경험_평균_일치(self, params: NetworkParams, kernel: ClusterKernel) -> None:
        """창 반경 R 밖 클러스터 몫을 원거리 근사로 되돌린 값과 4 표준오차 이내."""
        rng = np.random.default_rng(99)
        radius = 3.0
        for s in np.geomspace(1e-9, 1e-5, 10):
            sp = float(s) * params.p_s
            outside = (
                2 * math.pi * params.lambda_p * params.nbar_as * sp
                / ((params.alpha - 2) * radius ** (params.alpha - 2))
            )
            windowed = laplace_inter(params, kernel, float(s)) * math.exp(outside)
            mean, se = estimate_laplace_inter(params, kernel, float(s), 4_000, radius, rng)
            assert abs(windowed - mean) <= 4 * se + 1e-4
