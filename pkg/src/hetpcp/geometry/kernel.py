"""클러스터 커널과 조건부 거리 법칙.

클러스터 중심 기준 오프셋 밀도 f_Y(y) 를 ClusterKernel 로 표현한다.
SBS 커널(σ_s)과 사용자 커널(σ_u)은 같은 타입의 두 인스턴스다.

거리 U = ‖x0 + y‖ 의 ν0 = ‖x0‖ 조건부 법칙:
  Gaussian  → Rician(ν0, σ)   pdf 는 i0e 로 스케일된 형태로 계산
              CCDF 는 Marcum Q1(ν0/σ, u/σ)
  Custom    → 극좌표 구적 (또는 직교좌표 구적)
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, partial
from typing import Literal

import numpy as np
from scipy import special
from scipy.integrate import cumulative_trapezoid

from hetpcp.errors import NumericsDomainError
from hetpcp.numerics.quadrature import QuadratureSpec, integrate
from hetpcp.numerics.special import marcum_q1

# Gaussian 커널에서 이 반경(σ 배수) 밖 질량은 exp(−72) 수준
GAUSSIAN_TAIL_SIGMAS = 12.0

_KERNEL_QUADRATURE = QuadratureSpec(relative_tolerance=1e-9, absolute_tolerance=1e-13)


class KernelKind(str, Enum):
    GAUSSIAN = "gaussian"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ClusterKernel:
    """등방성 2D 오프셋 밀도.

    Attributes:
        kind: gaussian | custom
        pdf_2d: f_Y(y1, y2) [km⁻²]
        scale: 특성 길이 [km] (Gaussian 은 σ)
        support_radius: 이 반경 밖 질량은 무시 가능 [km]
    """

    kind: KernelKind
    pdf_2d: Callable[[float, float], float] = field(repr=False)
    scale: float
    support_radius: float

    @classmethod
    def gaussian(cls, sigma: float) -> ClusterKernel:
        if not sigma > 0:
            raise NumericsDomainError(f"sigma 는 양수여야 합니다: {sigma!r}")
        norm = 1.0 / (2.0 * math.pi * sigma * sigma)
        inv = 0.5 / (sigma * sigma)

        def pdf_2d(y1: float, y2: float) -> float:
            return norm * math.exp(-(y1 * y1 + y2 * y2) * inv)

        return cls(KernelKind.GAUSSIAN, pdf_2d, sigma, GAUSSIAN_TAIL_SIGMAS * sigma)

    @classmethod
    def custom(
        cls,
        pdf_2d: Callable[[float, float], float],
        *,
        scale: float,
        support_radius: float,
        isotropy_probes: int = 32,
        tolerance: float = 1e-6,
    ) -> ClusterKernel:
        """사용자 정의 커널. 등방성과 정규화를 수치적으로 검증한다."""
        if not 0 < scale <= support_radius:
            raise NumericsDomainError("0 < scale ≤ support_radius 이어야 합니다")
        probes = np.random.default_rng(0).uniform(0.0, support_radius, size=(isotropy_probes, 2))
        for rho, theta in zip(probes[:, 0], probes[:, 1] * 2 * math.pi / support_radius):
            ref = pdf_2d(rho, 0.0)
            rotated = pdf_2d(rho * math.cos(theta), rho * math.sin(theta))
            if abs(rotated - ref) > tolerance * max(abs(ref), 1e-300) + 1e-300:
                raise NumericsDomainError(f"커널이 등방적이지 않습니다 (ρ={rho:.4g})")
        kernel = cls(KernelKind.CUSTOM, pdf_2d, scale, support_radius)
        mass = kernel.radial_mass(support_radius)
        if abs(mass - 1.0) > tolerance:
            raise NumericsDomainError(f"커널 질량이 1 이 아닙니다: {mass:.9g}")
        return kernel

    @property
    def sigma(self) -> float:
        if self.kind is not KernelKind.GAUSSIAN:
            raise NumericsDomainError("sigma 는 Gaussian 커널에만 정의됩니다")
        return self.scale

    @property
    def tail_radius(self) -> float:
        """오프셋 노름이 사실상 넘지 않는 반경."""
        return self.support_radius

    def radial_pdf(self, rho: float) -> float:
        """‖Y‖ 의 밀도 2πρ·f_Y(ρ, 0)."""
        return 2.0 * math.pi * rho * self.pdf_2d(rho, 0.0)

    def radial_mass(self, radius: float) -> float:
        if radius <= 0:
            return 0.0
        return integrate(
            self.radial_pdf,
            0.0,
            radius,
            _KERNEL_QUADRATURE,
            points=(self.scale, 3 * self.scale),
            label="kernel_radial_mass",
        )

    @cached_property
    def _radial_inverse_table(self) -> tuple[np.ndarray, np.ndarray]:
        radii = np.linspace(0.0, self.support_radius, 4097)
        dens = np.array([self.radial_pdf(r) for r in radii])
        cdf = cumulative_trapezoid(dens, radii, initial=0.0)
        return cdf / cdf[-1], radii

    def sample_offsets(self, rng: np.random.Generator, size: int | tuple[int, ...]) -> np.ndarray:
        """오프셋 샘플. 반환 shape 은 (*size, 2)."""
        shape = (size,) if isinstance(size, int) else tuple(size)
        if self.kind is KernelKind.GAUSSIAN:
            return rng.normal(0.0, self.scale, size=(*shape, 2))
        cdf, radii = self._radial_inverse_table
        rho = np.interp(rng.random(shape), cdf, radii)
        theta = rng.uniform(0.0, 2.0 * math.pi, size=shape)
        return np.stack((rho * np.cos(theta), rho * np.sin(theta)), axis=-1)


@dataclass(frozen=True)
class ConditionalDistanceLaw:
    """ν0 조건부 거리 법칙 (pdf/cdf/sf 는 (u, ν0) → 값)."""

    pdf: Callable[[float, float], float]
    cdf: Callable[[float, float], float]
    sf: Callable[[float, float], float]


# ─── Rician 폐형식 ───────────────────────────────────


def rician_pdf(u: np.ndarray | float, nu0: float, sigma: float) -> np.ndarray | float:
    """Rician 밀도 (u/σ²)·exp(−(u−ν0)²/2σ²)·i0e(uν0/σ²). 벡터 입력 허용."""
    s2 = sigma * sigma
    u = np.asarray(u, dtype=float)
    out = (u / s2) * np.exp(-0.5 * (u - nu0) ** 2 / s2) * special.i0e(u * nu0 / s2)
    out = np.where(u > 0, out, 0.0)
    return float(out) if out.ndim == 0 else out


def _check_args(u: float, nu0: float) -> None:
    if not u >= 0 or not nu0 >= 0:
        raise NumericsDomainError(f"거리는 0 이상이어야 합니다: u={u!r}, nu0={nu0!r}")


# ─── 일반 커널 (구적) ────────────────────────────────


def _angular_mass(kernel: ClusterKernel, rho: float, nu0: float) -> float:
    """∫_0^{2π} f_Y(ρcosθ − ν0, ρ sinθ) dθ (x 축 대칭 이용)."""
    if rho == 0.0:
        return 2.0 * math.pi * kernel.pdf_2d(-nu0, 0.0)
    pdf = kernel.pdf_2d

    def ring(theta: float) -> float:
        return pdf(rho * math.cos(theta) - nu0, rho * math.sin(theta))

    width = kernel.scale / rho
    return 2.0 * integrate(
        ring, 0.0, math.pi, _KERNEL_QUADRATURE, points=(width, 4 * width), label="angular_mass"
    )


def distance_cdf_general(
    kernel: ClusterKernel,
    u: float,
    nu0: float,
    *,
    method: Literal["polar", "cartesian"] = "polar",
) -> float:
    """F_U(u | ν0) 를 커널 밀도의 원판 적분으로 계산 (모든 커널에 적용)."""
    _check_args(u, nu0)
    if u == 0.0:
        return 0.0
    pdf = kernel.pdf_2d
    s = kernel.scale
    if method == "polar":
        value = integrate(
            lambda rho: rho * _angular_mass(kernel, rho, nu0),
            0.0,
            u,
            _KERNEL_QUADRATURE,
            points=(nu0 - 3 * s, nu0, nu0 + 3 * s),
            label="distance_cdf_polar",
        )
    elif method == "cartesian":

        def column(z1: float) -> float:
            half = math.sqrt(max(u * u - z1 * z1, 0.0))
            if half == 0.0:
                return 0.0
            return 2.0 * integrate(
                lambda z2: pdf(z1 - nu0, z2),
                0.0,
                half,
                _KERNEL_QUADRATURE,
                points=(s, 3 * s),
                label="distance_cdf_column",
            )

        value = integrate(
            column,
            -u,
            u,
            _KERNEL_QUADRATURE,
            points=(nu0 - 3 * s, nu0, nu0 + 3 * s),
            label="distance_cdf_cartesian",
        )
    else:
        raise NumericsDomainError(f"지원하지 않는 method: {method!r}")
    return min(1.0, max(0.0, value))


# ─── 공개 연산 ───────────────────────────────────────


def distance_sf(kernel: ClusterKernel, u: float, nu0: float) -> float:
    """1 − F_U(u | ν0)."""
    _check_args(u, nu0)
    if kernel.kind is KernelKind.GAUSSIAN:
        return marcum_q1(nu0 / kernel.scale, u / kernel.scale)
    return 1.0 - distance_cdf_general(kernel, u, nu0)


def distance_cdf(kernel: ClusterKernel, u: float, nu0: float) -> float:
    """F_U(u | ν0). Gaussian 은 1 − Q1(ν0/σ, u/σ)."""
    _check_args(u, nu0)
    if kernel.kind is KernelKind.GAUSSIAN:
        return 1.0 - marcum_q1(nu0 / kernel.scale, u / kernel.scale)
    return distance_cdf_general(kernel, u, nu0)


def distance_pdf(kernel: ClusterKernel, u: float, nu0: float) -> float:
    """f_U(u | ν0). u = 0 에서 0."""
    _check_args(u, nu0)
    if u == 0.0:
        return 0.0
    if kernel.kind is KernelKind.GAUSSIAN:
        return rician_pdf(u, nu0, kernel.scale)
    return u * _angular_mass(kernel, u, nu0)


def distance_pdf_array(kernel: ClusterKernel, u: np.ndarray, nu0: float) -> np.ndarray:
    """distance_pdf 의 벡터 버전 (내부 고정규칙 적분용)."""
    u = np.asarray(u, dtype=float)
    if kernel.kind is KernelKind.GAUSSIAN:
        return np.asarray(rician_pdf(u, nu0, kernel.scale), dtype=float)
    return np.array([distance_pdf(kernel, float(v), nu0) for v in u.ravel()]).reshape(u.shape)


def user_center_distance_pdf(kernel: ClusterKernel, nu0: float) -> float:
    """사용자–클러스터 중심 거리 V0 의 밀도 (Gaussian 은 Rayleigh)."""
    if not nu0 >= 0:
        raise NumericsDomainError(f"nu0 는 0 이상이어야 합니다: {nu0!r}")
    if kernel.kind is KernelKind.GAUSSIAN:
        s2 = kernel.scale * kernel.scale
        return nu0 / s2 * math.exp(-0.5 * nu0 * nu0 / s2)
    return kernel.radial_pdf(nu0)


def user_center_distance_cdf(kernel: ClusterKernel, nu0: float) -> float:
    if not nu0 >= 0:
        raise NumericsDomainError(f"nu0 는 0 이상이어야 합니다: {nu0!r}")
    if kernel.kind is KernelKind.GAUSSIAN:
        return -math.expm1(-0.5 * nu0 * nu0 / (kernel.scale * kernel.scale))
    return min(1.0, kernel.radial_mass(nu0))


def intercluster_distance_pdf(kernel: ClusterKernel, t: float, nu: float) -> float:
    """중심 거리 ν 인 다른 클러스터의 SBS 까지 거리 T 의 밀도."""
    return distance_pdf(kernel, t, nu)


def conditional_distance_law(kernel: ClusterKernel) -> ConditionalDistanceLaw:
    return ConditionalDistanceLaw(
        pdf=partial(distance_pdf, kernel),
        cdf=partial(distance_cdf, kernel),
        sf=partial(distance_sf, kernel),
    )
