"""연결(association) 확률과 서빙/간섭원 거리 법칙.

정책별 연결 규칙 (R_m: 최근접 MBS 거리, R_s: 대표 클러스터 최근접 SBS 거리)
  P1  small ⇔ R_s ≤ ξ_sm·R_m   (수신 전력 비교)
  P2  small ⇔ R_s ≤ D

서빙 거리의 결합밀도 A_j(ν0)·f_Xj(x|ν0) 는 serving_joint_density 가 돌려주고,
조건부 밀도 f_Xj 는 이를 A_j 로 나눈 값이다. 커버리지 적분은 결합밀도를 직접 써서
A_j 로의 나눗셈을 피한다.
"""

from __future__ import annotations

import math

import structlog

from hetpcp.errors import DegenerateConditioningError, NumericsDomainError
from hetpcp.geometry.kernel import (
    ClusterKernel,
    ConditionalDistanceLaw,
    distance_pdf,
    distance_sf,
)
from hetpcp.models.params import AssociationPolicy, NetworkParams, Tier
from hetpcp.numerics.quadrature import QuadratureSpec, integrate

logger = structlog.get_logger()

# 조건부 분모가 이 값 미만이면 퇴화로 간주
DEGENERATE_SF = 1e-12

ASSOCIATION_QUADRATURE = QuadratureSpec(relative_tolerance=1e-8, absolute_tolerance=1e-12)


# ─── 최근접 거리 ─────────────────────────────────────


def nearest_macro_law(params: NetworkParams) -> ConditionalDistanceLaw:
    """R_m 의 법칙: f = 2πλ_m r·exp(−πλ_m r²) (ν0 무관)."""
    lam = params.lambda_m

    def pdf(r: float, nu0: float = 0.0) -> float:
        return 2.0 * math.pi * lam * r * math.exp(-math.pi * lam * r * r) if r > 0 else 0.0

    def sf(r: float, nu0: float = 0.0) -> float:
        return math.exp(-math.pi * lam * r * r) if r > 0 else 1.0

    def cdf(r: float, nu0: float = 0.0) -> float:
        return -math.expm1(-math.pi * lam * r * r) if r > 0 else 0.0

    return ConditionalDistanceLaw(pdf=pdf, cdf=cdf, sf=sf)


def nearest_sbs_sf(params: NetworkParams, kernel: ClusterKernel, r_s: float, nu0: float) -> float:
    """P(R_s > r_s | ν0) = (1 − F_U(r_s|ν0))^n_s0."""
    return distance_sf(kernel, r_s, nu0) ** params.n_s0


def nearest_sbs_cdf(params: NetworkParams, kernel: ClusterKernel, r_s: float, nu0: float) -> float:
    return 1.0 - nearest_sbs_sf(params, kernel, r_s, nu0)


def nearest_sbs_pdf(params: NetworkParams, kernel: ClusterKernel, r_s: float, nu0: float) -> float:
    """n_s0·(1 − F_U)^(n_s0−1)·f_U."""
    n = params.n_s0
    sf = distance_sf(kernel, r_s, nu0)
    return n * sf ** (n - 1) * distance_pdf(kernel, r_s, nu0)


# ─── 연결 확률 ───────────────────────────────────────


def macro_breakpoints(params: NetworkParams, kernel: ClusterKernel, nu0: float) -> tuple:
    xi = params.xi_sm
    s = kernel.scale
    return (
        max(nu0 - 3 * s, 0.0) / xi,
        nu0 / xi,
        (nu0 + 3 * s) / xi,
        1.0 / math.sqrt(math.pi * params.lambda_m),
    )


def assoc_prob_policy1(
    params: NetworkParams, kernel: ClusterKernel, nu0: float, tier: Tier
) -> float:
    """P1 연결 확률. A_m = ∫ P(R_s > ξ_sm·r) f_Rm(r) dr, A_s = 1 − A_m."""
    if not nu0 >= 0:
        raise NumericsDomainError(f"nu0 는 0 이상이어야 합니다: {nu0!r}")
    f_rm = nearest_macro_law(params).pdf
    xi = params.xi_sm
    a_macro = integrate(
        lambda r: nearest_sbs_sf(params, kernel, xi * r, nu0) * f_rm(r),
        0.0,
        params.macro_reach,
        ASSOCIATION_QUADRATURE,
        points=macro_breakpoints(params, kernel, nu0),
        label="assoc_p1_macro",
    )
    a_macro = min(1.0, max(0.0, a_macro))
    return a_macro if tier is Tier.MACRO else 1.0 - a_macro


def assoc_prob_policy2(
    params: NetworkParams, kernel: ClusterKernel, nu0: float, tier: Tier
) -> float:
    """P2 연결 확률. A_s = F_Rs(D|ν0), A_m = 1 − A_s."""
    if not nu0 >= 0:
        raise NumericsDomainError(f"nu0 는 0 이상이어야 합니다: {nu0!r}")
    a_macro = nearest_sbs_sf(params, kernel, params.distance_threshold, nu0)
    return a_macro if tier is Tier.MACRO else 1.0 - a_macro


def assoc_prob(
    params: NetworkParams,
    kernel: ClusterKernel,
    policy: AssociationPolicy,
    nu0: float,
    tier: Tier,
) -> float:
    if policy is AssociationPolicy.P1:
        return assoc_prob_policy1(params, kernel, nu0, tier)
    return assoc_prob_policy2(params, kernel, nu0, tier)


# ─── 서빙 거리 ───────────────────────────────────────


def serving_joint_density(
    params: NetworkParams,
    kernel: ClusterKernel,
    policy: AssociationPolicy,
    tier: Tier,
    x: float,
    nu0: float,
) -> float:
    """A_j(ν0)·f_Xj(x|ν0) — 서빙 tier 와 서빙 거리의 결합밀도."""
    if not x >= 0:
        raise NumericsDomainError(f"x 는 0 이상이어야 합니다: {x!r}")
    if x == 0.0:
        return 0.0
    f_rm = nearest_macro_law(params).pdf
    if policy is AssociationPolicy.P1:
        if tier is Tier.MACRO:
            return nearest_sbs_sf(params, kernel, params.xi_sm * x, nu0) * f_rm(x)
        reach = params.xi_ms * x
        return math.exp(-math.pi * params.lambda_m * reach * reach) * nearest_sbs_pdf(
            params, kernel, x, nu0
        )
    if tier is Tier.SMALL:
        if x > params.distance_threshold:
            return 0.0
        return nearest_sbs_pdf(params, kernel, x, nu0)
    return assoc_prob_policy2(params, kernel, nu0, Tier.MACRO) * f_rm(x)


def serving_distance_pdf(
    params: NetworkParams,
    kernel: ClusterKernel,
    policy: AssociationPolicy,
    tier: Tier,
    x: float,
    nu0: float,
) -> float:
    """f_Xj(x|ν0). P2 small 은 x ≤ D 에서만 정의된다."""
    if policy is AssociationPolicy.P2 and tier is Tier.SMALL and x > params.distance_threshold:
        raise NumericsDomainError(f"P2 small 서빙 거리는 D 이하여야 합니다: x={x!r}")
    a = assoc_prob(params, kernel, policy, nu0, tier)
    if a <= 0.0:
        raise DegenerateConditioningError(
            f"연결 확률이 0 입니다 (policy={policy.value}, tier={tier.value}, nu0={nu0!r})"
        )
    return serving_joint_density(params, kernel, policy, tier, x, nu0) / a


# ─── 클러스터 내 간섭원 거리 ─────────────────────────


def exclusion_radius(
    params: NetworkParams, policy: AssociationPolicy, tier: Tier, x: float
) -> float:
    """대표 클러스터 간섭 SBS 의 배제 반경.

    P1 macro: ξ_sm·x / P1 small: x / P2 small: x / P2 macro: D
    """
    if policy is AssociationPolicy.P1:
        return params.xi_sm * x if tier is Tier.MACRO else x
    return x if tier is Tier.SMALL else params.distance_threshold


def interferer_distance_pdf(
    params: NetworkParams,
    kernel: ClusterKernel,
    policy: AssociationPolicy,
    tier: Tier,
    w: float,
    nu0: float,
    x: float,
) -> float:
    """f_W(w|ν0, x) = f_U(w|ν0) / (1 − F_U(배제반경|ν0)), 배제 반경 아래는 0."""
    lower = exclusion_radius(params, policy, tier, x)
    if w < lower:
        return 0.0
    denom = distance_sf(kernel, lower, nu0)
    if denom < DEGENERATE_SF:
        raise DegenerateConditioningError(
            f"배제 반경 {lower:.4g} km 밖 SBS 확률이 {denom:.3g} 입니다"
        )
    return distance_pdf(kernel, w, nu0) / denom
