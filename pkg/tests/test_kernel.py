"""클러스터 커널과 조건부 거리 법칙 테스트."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import stats

from hetpcp.errors import NumericsDomainError
from hetpcp.geometry.kernel import (
    ClusterKernel,
    KernelKind,
    conditional_distance_law,
    distance_cdf,
    distance_cdf_general,
    distance_pdf,
    distance_sf,
    rician_pdf,
    user_center_distance_cdf,
    user_center_distance_pdf,
)
from hetpcp.numerics.quadrature import integrate

SIGMA = 0.04


def gaussian_as_custom(sigma: float) -> ClusterKernel:
    """Gaussian 밀도를 custom 커널로 감싼 것 (구적 경로 검증용)."""
    norm = 1.0 / (2.0 * math.pi * sigma * sigma)

    def pdf_2d(y1: float, y2: float) -> float:
        return norm * math.exp(-(y1 * y1 + y2 * y2) / (2.0 * sigma * sigma))

    return ClusterKernel.custom(pdf_2d, scale=sigma, support_radius=12 * sigma)


class TestClusterKernel:
    """ClusterKernel 생성과 검증."""

    def test_gaussian_속성(self) -> None:
        k = ClusterKernel.gaussian(SIGMA)
        assert k.kind is KernelKind.GAUSSIAN
        assert k.sigma == SIGMA
        assert k.tail_radius == pytest.approx(12 * SIGMA)

    def test_gaussian_음수_sigma(self) -> None:
        with pytest.raises(NumericsDomainError):
            ClusterKernel.gaussian(0.0)

    def test_custom_질량_1(self) -> None:
        k = gaussian_as_custom(SIGMA)
        assert k.radial_mass(k.support_radius) == pytest.approx(1.0, abs=1e-9)

    def test_custom_비등방_거부(self) -> None:
        """y1 에만 의존하는 밀도는 등방성 검사에서 거부된다."""

        def pdf_2d(y1: float, y2: float) -> float:
            return math.exp(-abs(y1) / SIGMA) * math.exp(-(y2 * y2) / SIGMA**2)

        with pytest.raises(NumericsDomainError, match="등방"):
            ClusterKernel.custom(pdf_2d, scale=SIGMA, support_radius=12 * SIGMA)

    def test_custom_정규화_거부(self) -> None:
        """질량이 1 이 아니면 거부된다."""

        def pdf_2d(y1: float, y2: float) -> float:
            return 2.0 * math.exp(-(y1 * y1 + y2 * y2) / (2 * SIGMA**2)) / (2 * math.pi * SIGMA**2)

        with pytest.raises(NumericsDomainError, match="질량"):
            ClusterKernel.custom(pdf_2d, scale=SIGMA, support_radius=12 * SIGMA)

    def test_gaussian_표본_분산(self, rng: np.random.Generator) -> None:
        off = ClusterKernel.gaussian(SIGMA).sample_offsets(rng, (2000, 5))
        assert off.shape == (2000, 5, 2)
        assert off.std() == pytest.approx(SIGMA, rel=0.02)

    def test_custom_표본_KS(self, rng: np.random.Generator) -> None:
        """custom 커널 역CDF 표본의 ‖Y‖ 는 Rayleigh(σ) 를 따른다."""
        off = gaussian_as_custom(SIGMA).sample_offsets(rng, 20_000)
        radius = np.hypot(off[:, 0], off[:, 1])
        assert stats.kstest(radius, stats.rayleigh(scale=SIGMA).cdf).pvalue > 0.01


class TestDistanceLaws:
    """F_U(u | ν0), f_U(u | ν0)."""

    @pytest.mark.parametrize("nu0", [0.0, 0.02, 0.1])
    def test_pdf_정규화(self, nu0: float) -> None:
        k = ClusterKernel.gaussian(SIGMA)
        mass = integrate(
            lambda u: distance_pdf(k, u, nu0), 0.0, nu0 + 12 * SIGMA, points=(nu0,)
        )
        assert mass == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize(("u", "nu0"), [(0.03, 0.0), (0.05, 0.04), (0.12, 0.1)])
    def test_polar_cartesian_marcum_일치(self, u: float, nu0: float) -> None:
        """극좌표/직교좌표 구적과 Marcum 폐형식이 같은 CDF 를 준다."""
        gaussian = ClusterKernel.gaussian(SIGMA)
        custom = gaussian_as_custom(SIGMA)
        closed = distance_cdf(gaussian, u, nu0)
        assert distance_cdf_general(custom, u, nu0, method="polar") == pytest.approx(
            closed, abs=1e-7
        )
        assert distance_cdf_general(custom, u, nu0, method="cartesian") == pytest.approx(
            closed, abs=1e-7
        )

    def test_cdf_sf_합(self) -> None:
        k = ClusterKernel.gaussian(SIGMA)
        assert distance_cdf(k, 0.05, 0.03) + distance_sf(k, 0.05, 0.03) == pytest.approx(1.0)

    def test_nu0_0_Rayleigh(self) -> None:
        """ν0 = 0 이면 F_U(u) = 1 − exp(−u²/2σ²)."""
        k = ClusterKernel.gaussian(SIGMA)
        u = 2 * SIGMA
        assert distance_cdf(k, u, 0.0) == pytest.approx(1.0 - math.exp(-2.0), rel=1e-10)

    def test_rician_벡터(self) -> None:
        u = np.array([0.0, 0.02, 0.05])
        values = rician_pdf(u, 0.03, SIGMA)
        assert values.shape == (3,)
        assert values[0] == 0.0
        assert values[1] == pytest.approx(rician_pdf(0.02, 0.03, SIGMA))

    def test_scipy_rice_일치(self) -> None:
        """scipy.stats.rice(b=ν0/σ, scale=σ) 와 같은 밀도."""
        nu0 = 0.06
        for u in (0.02, 0.06, 0.1):
            expected = stats.rice.pdf(u, nu0 / SIGMA, scale=SIGMA)
            assert rician_pdf(u, nu0, SIGMA) == pytest.approx(expected, rel=1e-9)

    def test_custom_pdf_구적(self) -> None:
        """custom 커널의 f_U 는 Rician 과 같다."""
        custom = gaussian_as_custom(SIGMA)
        assert distance_pdf(custom, 0.05, 0.03) == pytest.approx(
            rician_pdf(0.05, 0.03, SIGMA), rel=1e-7
        )

    def test_음수_거리_에러(self) -> None:
        with pytest.raises(NumericsDomainError):
            distance_cdf(ClusterKernel.gaussian(SIGMA), -0.1, 0.0)

    def test_conditional_distance_law(self) -> None:
        k = ClusterKernel.gaussian(SIGMA)
        law = conditional_distance_law(k)
        assert law.cdf(0.05, 0.02) == distance_cdf(k, 0.05, 0.02)
        assert law.sf(0.05, 0.02) == distance_sf(k, 0.05, 0.02)


class TestUserCenterDistance:
    """V0 (사용자–클러스터 중심 거리)."""

    def test_Rayleigh(self) -> None:
        k = ClusterKernel.gaussian(SIGMA)
        assert user_center_distance_cdf(k, SIGMA) == pytest.approx(1.0 - math.exp(-0.5))
        assert user_center_distance_pdf(k, SIGMA) == pytest.approx(
            stats.rayleigh.pdf(SIGMA, scale=SIGMA)
        )

    def test_custom_일치(self) -> None:
        custom = gaussian_as_custom(SIGMA)
        assert user_center_distance_cdf(custom, SIGMA) == pytest.approx(
            1.0 - math.exp(-0.5), rel=1e-8
        )

    def test_표본_KS(self, rng: np.random.Generator) -> None:
        """사용자 오프셋 노름의 경험분포가 F_V0 와 일치."""
        k = ClusterKernel.gaussian(SIGMA)
        off = k.sample_offsets(rng, 20_000)
        v0 = np.hypot(off[:, 0], off[:, 1])
        cdf = np.vectorize(lambda v: user_center_distance_cdf(k, float(v)))
        assert stats.kstest(v0, cdf).pvalue > 0.01
