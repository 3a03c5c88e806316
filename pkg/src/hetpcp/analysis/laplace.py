"""간섭 Laplace 변환.

세 간섭원 그룹에 대해 L(s) = E[exp(−s·I)] 를 Rayleigh 페이딩을 평균한 형태로 계산한다.

  laplace_intra  대표 클러스터의 다른 활성 SBS (ν0, 서빙거리 x 조건부)
                 EXACT       절단 Poisson 가중 합 Σ_ℓ p_ℓ·g^(간섭원 수)
                 SIMPLIFIED  exp(−n̄·∫ f_W(w)/(1 + w^α/(sP_s)) dw)
  laplace_inter  다른 클러스터 전체 (PPP 생성 범함수 + 클러스터별 Poisson(n̄))
                 exp(−2πλ_p ∫_0^∞ (1 − exp(−n̄·∫ f_T(t|ν)/(1 + t^α/(sP_s)) dt)) ν dν)
  laplace_macro  MBS 간섭 (배제 반경 밖 PPP)
                 exp(−2πλ_m (sP_m)^(2/α) ∫_a^∞ v/(1+v^α) dv),  a = 배제반경/(sP_m)^(1/α)

내부 거리 적분은 밀도 창 [max(0, ν−R), ν+R] 위 복합 Gauss–Legendre, 외부 적분은 적응형이다.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
import structlog
from scipy.interpolate import PchipInterpolator

from hetpcp.analysis.active_set import active_count_pmf
from hetpcp.analysis.association import DEGENERATE_SF, exclusion_radius
from hetpcp.errors import DegenerateConditioningError, NumericsDomainError
from hetpcp.geometry.kernel import ClusterKernel, distance_pdf_array
from hetpcp.models.params import AssociationPolicy, LaplaceMode, NetworkParams, Tier
from hetpcp.numerics.quadrature import QuadratureSpec, integrate, integrate_fixed
from hetpcp.numerics.special import sinc_alpha

logger = structlog.get_logger()

EXACT_MODE_MAX_CLUSTER = 30
INTER_QUADRATURE = QuadratureSpec(relative_tolerance=1e-9, absolute_tolerance=1e-14)
MACRO_QUADRATURE = QuadratureSpec(relative_tolerance=1e-11, absolute_tolerance=1e-14)
# 절단 꼬리: 외부 피적분 함수가 최댓값의 이 비율 아래로 떨어지는 ν 에서 자른다
TRUNCATION_RATIO = 1e-12
MAX_CUT_DOUBLINGS = 80


class OuterTail(str, Enum):
    """클러스터 간 외부 적분의 무한 꼬리 처리."""

    SUBSTITUTION = "substitution"
    TRUNCATED = "truncated"  # 유한 절단 + 원거리 해석 꼬리


@lru_cache(maxsize=256)
def validate_mode(params: NetworkParams, mode: LaplaceMode) -> None:
    """모드 계약 검사. 같은 params 에 대해 경고는 한 번만 남는다."""
    if mode is LaplaceMode.EXACT and params.n_s0 > EXACT_MODE_MAX_CLUSTER:
        raise NumericsDomainError(
            f"EXACT 모드는 n_s0 ≤ {EXACT_MODE_MAX_CLUSTER} 에서만 지원합니다 (n_s0={params.n_s0})"
        )
    if mode is LaplaceMode.SIMPLIFIED and params.nbar_as > params.n_s0 / 3:
        logger.warning(
            "simplified_laplace_outside_regime",
            nbar_as=params.nbar_as,
            n_s0=params.n_s0,
            hint="n̄ ≪ n_s0 가정이 약함 — mode=exact 권장",
        )


# ─── 거리 창 적분 ────────────────────────────────────


def _window_edges(kernel: ClusterKernel, nu: float, lower: float, corner: float) -> list[float]:
    hi = nu + kernel.tail_radius
    s = kernel.scale
    marks = (nu - 6 * s, nu - 2 * s, nu, nu + 2 * s, nu + 6 * s, s, corner)
    return [lower, *(m for m in marks if lower < m < hi), hi]


def _window_mean(
    kernel: ClusterKernel, nu: float, lower: float, sp: float, alpha: float
) -> tuple[float, float]:
    """(질량 ∫_lower f, ∫_lower f·sP/(sP + t^α)) — f 는 ν 조건부 거리 밀도."""
    edges = _window_edges(kernel, nu, lower, sp ** (1.0 / alpha))

    def mass(t: np.ndarray) -> np.ndarray:
        return distance_pdf_array(kernel, t, nu)

    def weighted(t: np.ndarray) -> np.ndarray:
        return distance_pdf_array(kernel, t, nu) * (sp / (sp + t**alpha))

    return integrate_fixed(mass, edges), integrate_fixed(weighted, edges)


def intra_kernel_mean(
    kernel: ClusterKernel, nu0: float, lower: float, sp: float, alpha: float
) -> float:
    """E[sP/(sP + W^α)], W ~ f_U(·|ν0) 를 lower 위로 절단·정규화한 분포."""
    if lower >= nu0 + kernel.tail_radius:
        raise DegenerateConditioningError(f"배제 반경 {lower:.4g} 가 커널 창 밖입니다")
    mass, weighted = _window_mean(kernel, nu0, max(lower, 0.0), sp, alpha)
    if mass < DEGENERATE_SF:
        raise DegenerateConditioningError(f"배제 반경 밖 질량이 {mass:.3g} 입니다")
    return min(1.0, weighted / mass)


def intercluster_kernel_mean(kernel: ClusterKernel, nu: float, sp: float, alpha: float) -> float:
    """E[sP/(sP + T^α)], T ~ f_T(·|ν) (다른 클러스터 SBS 까지 거리)."""
    _, weighted = _window_mean(kernel, nu, max(nu - kernel.tail_radius, 0.0), sp, alpha)
    return weighted


# ─── 클러스터 내 간섭 ────────────────────────────────


@dataclass(frozen=True)
class LaplaceContext:
    """클러스터 내 Laplace 변환의 조건 — (정책, tier, ν0, 서빙거리 x, 모드)."""

    params: NetworkParams
    kernel: ClusterKernel
    policy: AssociationPolicy
    tier: Tier
    nu0: float
    x: float
    mode: LaplaceMode = LaplaceMode.SIMPLIFIED

    def __post_init__(self) -> None:
        validate_mode(self.params, self.mode)

    @property
    def exclusion(self) -> float:
        return exclusion_radius(self.params, self.policy, self.tier, self.x)


def laplace_intra(ctx: LaplaceContext, s: float) -> float:
    """대표 클러스터 내 간섭의 Laplace 변환."""
    if not s >= 0:
        raise NumericsDomainError(f"s 는 0 이상이어야 합니다: {s!r}")
    params = ctx.params
    nbar = params.nbar_as
    if s == 0.0 or nbar == 0.0:
        return 1.0
    try:
        h = intra_kernel_mean(ctx.kernel, ctx.nu0, ctx.exclusion, s * params.p_s, params.alpha)
    except DegenerateConditioningError:
        logger.debug("intra_conditioning_degenerate", nu0=ctx.nu0, x=ctx.x, tier=ctx.tier.value)
        return 1.0
    if ctx.mode is LaplaceMode.SIMPLIFIED:
        return math.exp(-nbar * h)

    small = ctx.tier is Tier.SMALL
    support, pmf = active_count_pmf(nbar, params.n_s0, conditioned_on_serving=small)
    interferers = support - 1 if small else support
    g = 1.0 - h
    return float(np.sum(pmf * np.power(g, interferers)))


# ─── 클러스터 간 간섭 ────────────────────────────────


def _far_field_tail(nbar: float, sp: float, alpha: float, cut: float) -> float:
    """∫_cut^∞ n̄·sP·ν^(1−α) dν — T ≈ ν, sP ≪ ν^α 인 원거리 근사."""
    return nbar * sp * cut ** (2.0 - alpha) / (alpha - 2.0)


def _inter_outer(params: NetworkParams, kernel: ClusterKernel, sp: float):
    """ν ↦ (1 − exp(−n̄·E[sP/(sP + T^α)]))·ν."""
    nbar, alpha = params.nbar_as, params.alpha

    def outer(nu: float) -> float:
        return -math.expm1(-nbar * intercluster_kernel_mean(kernel, nu, sp, alpha)) * nu

    return outer


def inter_truncation_cut(
    params: NetworkParams, kernel: ClusterKernel, s: float
) -> tuple[float, list[float]]:
    """(절단 ν, 구간 경계). 외부 피적분 함수가 최댓값의 TRUNCATION_RATIO 아래가 될 때까지 두 배씩 늘린다.

    최댓값은 [10⁻⁴·ν_start, ν_start] 의 로그 격자에서 찾는다 (ν_start = 2(반경 + corner)).
    """
    sp = s * params.p_s
    corner = sp ** (1.0 / params.alpha)
    reach = kernel.tail_radius
    outer = _inter_outer(params, kernel, sp)
    start = 2.0 * (reach + corner)
    peak = max(outer(float(nu)) for nu in np.geomspace(1e-4 * start, start, 64))
    cut = start
    breaks = [kernel.scale, reach, corner, start]
    for _ in range(MAX_CUT_DOUBLINGS):
        if outer(cut) < TRUNCATION_RATIO * peak:
            return cut, breaks
        cut *= 2.0
        breaks.append(cut)
    logger.warning("inter_truncation_not_reached", s=s, cut=cut, peak=peak)
    return cut, breaks


def laplace_inter(
    params: NetworkParams,
    kernel: ClusterKernel,
    s: float,
    *,
    tail: OuterTail = OuterTail.SUBSTITUTION,
    spec: QuadratureSpec = INTER_QUADRATURE,
) -> float:
    """다른 클러스터들의 간섭 Laplace 변환 (ν 외부 적분).

    TRUNCATED 는 inter_truncation_cut 에서 자르고 그 너머는 원거리 해석 꼬리로 더한다.
    """
    if not s >= 0:
        raise NumericsDomainError(f"s 는 0 이상이어야 합니다: {s!r}")
    nbar = params.nbar_as
    if s == 0.0 or nbar == 0.0:
        return 1.0
    alpha = params.alpha
    sp = s * params.p_s
    corner = sp ** (1.0 / alpha)
    outer = _inter_outer(params, kernel, sp)

    if tail is OuterTail.SUBSTITUTION:
        total = integrate(
            outer, 0.0, math.inf, spec, scale=max(kernel.scale, corner), label="laplace_inter"
        )
    else:
        cut, breaks = inter_truncation_cut(params, kernel, s)
        total = integrate(
            outer, 0.0, cut, spec, points=breaks, label="laplace_inter_truncated"
        ) + _far_field_tail(nbar, sp, alpha, cut)
    return math.exp(-2.0 * math.pi * params.lambda_p * total)


class InterLaplaceCache:
    """laplace_inter 를 로그 간격 s 노드에서 미리 계산하고 log L 을 PCHIP 보간한다.

    격자 밖의 s 는 직접 계산한다.
    """

    def __init__(
        self,
        params: NetworkParams,
        kernel: ClusterKernel,
        s_min: float,
        s_max: float,
        nodes: int = 256,
    ) -> None:
        if not 0 < s_min < s_max:
            raise NumericsDomainError(f"0 < s_min < s_max 이어야 합니다: {s_min!r}, {s_max!r}")
        self._params = params
        self._kernel = kernel
        self.s_min = s_min
        self.s_max = s_max
        grid = np.geomspace(s_min, s_max, nodes)
        values = np.array([laplace_inter(params, kernel, float(s)) for s in grid])
        self._interp = PchipInterpolator(
            np.log(grid), np.log(np.maximum(values, 1e-300)), extrapolate=False
        )
        logger.debug("inter_laplace_cache_built", nodes=nodes, s_min=s_min, s_max=s_max)

    def __call__(self, s: float) -> float:
        if s <= 0.0:
            return 1.0
        if s < self.s_min or s > self.s_max:
            return laplace_inter(self._params, self._kernel, s)
        return math.exp(float(self._interp(math.log(s))))


# ─── MBS 간섭 ────────────────────────────────────────


@lru_cache(maxsize=4096)
def scaled_macro_tail(a: float, alpha: float) -> float:
    """∫_a^∞ v/(1+v^α) dv. a = 0 이면 (π/α)/sin(2π/α)."""
    if a == 0.0:
        return 0.5 / sinc_alpha(alpha)
    return integrate(
        lambda v: v / (1.0 + v**alpha),
        a,
        math.inf,
        MACRO_QUADRATURE,
        scale=max(1.0, a),
        label="macro_tail",
    )


def laplace_macro(
    params: NetworkParams,
    policy: AssociationPolicy,
    tier: Tier,
    s: float,
    x: float | None = None,
) -> float:
    """MBS 간섭의 Laplace 변환.

    배제 반경: P1 macro → x, P1 small → ξ_ms·x, P2 macro → x, P2 small → 없음.
    """
    if not s >= 0:
        raise NumericsDomainError(f"s 는 0 이상이어야 합니다: {s!r}")
    if s == 0.0:
        return 1.0
    alpha = params.alpha
    sp = s * params.p_m
    if policy is AssociationPolicy.P2 and tier is Tier.SMALL:
        lower = 0.0
    else:
        if x is None:
            raise NumericsDomainError("서빙 거리 x 가 필요합니다")
        lower = x if tier is Tier.MACRO else params.xi_ms * x
    a = lower / sp ** (1.0 / alpha)
    exponent = 2.0 * math.pi * params.lambda_m * sp ** (2.0 / alpha) * scaled_macro_tail(a, alpha)
    return math.exp(-exponent)
