"""커버리지 확률과 처리율 — 해석 파이프라인의 최종 단계.

tier j 의 커버리지
  P_cj = ∫ f_V0(ν0) ∫ A_j(ν0)·f_Xj(x|ν0)·L_intra(s)·L_inter(s)·L_macro(s) dx dν0,  s = βx^α/P_j

흐름:
  outer_rule_nodes()   ν0 노드/가중치 (Gaussian 사용자 커널 → Gauss–Laguerre)
  _CoverageProblem     params/커널/정책/L_inter 캐시 묶음
  ._tier_at(ν0)        x 적응 적분 + A_j(ν0)
  coverage_policy*()   노드 순서대로 fsum → CoverageReport
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from enum import Enum

import numpy as np
import structlog
from numpy.polynomial.laguerre import laggauss
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import minimize_scalar

from hetpcp.analysis.association import assoc_prob, macro_breakpoints, serving_joint_density
from hetpcp.analysis.laplace import InterLaplaceCache, LaplaceContext, laplace_intra, laplace_macro
from hetpcp.errors import AccuracyNotReachedError, NumericsDomainError
from hetpcp.geometry.kernel import ClusterKernel, KernelKind, user_center_distance_pdf
from hetpcp.models.params import AssociationPolicy, LaplaceMode, NetworkParams, Tier
from hetpcp.models.report import CoverageReport, Provenance, ProvenanceKind, TierValues
from hetpcp.numerics.quadrature import QuadratureSpec, integrate, legendre_rule

logger = structlog.get_logger()


class OuterRule(str, Enum):
    FIXED = "fixed"
    ADAPTIVE = "adaptive"


class CoverageOptions(BaseModel):
    """해석 엔진 설정."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: LaplaceMode = LaplaceMode.SIMPLIFIED
    outer_rule: OuterRule = OuterRule.FIXED
    outer_nodes: int = Field(default=64, ge=4, le=512)
    inter_cache_nodes: int = Field(default=256, ge=16)
    quadrature: QuadratureSpec = QuadratureSpec(relative_tolerance=1e-6, absolute_tolerance=1e-10)
    workers: int = Field(default=1, ge=1)


DEFAULT_OPTIONS = CoverageOptions()


def default_kernels(params: NetworkParams) -> tuple[ClusterKernel, ClusterKernel]:
    """(SBS 커널, 사용자 커널) — 둘 다 Gaussian."""
    return ClusterKernel.gaussian(params.sigma_s), ClusterKernel.gaussian(params.sigma_u)


# ─── 처리율 ──────────────────────────────────────────


def throughput(
    params: NetworkParams,
    coverage_macro: float,
    coverage_small: float,
    policy: AssociationPolicy,
) -> float:
    """면적당 처리율 (λ_m·P_cm + λ_p·n̄·P_cs)·log2(1+β) [bit/s/Hz/km²].

    두 정책 모두 같은 산식이며, policy 는 입력 커버리지의 출처를 나타낸다.
    """
    for value in (coverage_macro, coverage_small):
        if not -1e-9 <= value <= 1.0 + 1e-9:
            raise NumericsDomainError(f"커버리지는 [0, 1] 이어야 합니다: {value!r} ({policy.value})")
    density = params.lambda_m * coverage_macro + params.lambda_p * params.nbar_as * coverage_small
    return density * math.log2(1.0 + params.beta)


# ─── 외부 ν0 규칙 ────────────────────────────────────


def outer_rule_nodes(user_kernel: ClusterKernel, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """∫ g(ν0) f_V0(ν0) dν0 ≈ Σ w_i g(ν_i) 가 되는 (ν_i, w_i).

    Gaussian 은 t = ν0²/(2σ²) 치환으로 f_V0 dν0 = e^(−t) dt → Gauss–Laguerre.
    """
    if user_kernel.kind is KernelKind.GAUSSIAN:
        t, w = laggauss(nodes)
        return user_kernel.scale * np.sqrt(2.0 * t), w
    x, w = legendre_rule(nodes)
    half = 0.5 * user_kernel.support_radius
    nu = half * (x + 1.0)
    density = np.array([user_center_distance_pdf(user_kernel, float(v)) for v in nu])
    return nu, half * w * density


# ─── 계산 문제 ───────────────────────────────────────


class _CoverageProblem:
    def __init__(
        self,
        params: NetworkParams,
        kernel: ClusterKernel,
        user_kernel: ClusterKernel,
        policy: AssociationPolicy,
        options: CoverageOptions,
    ) -> None:
        if policy is AssociationPolicy.P2:
            _ = params.distance_threshold  # P_0 미지정이면 여기서 실패
        self.params = params
        self.kernel = kernel
        self.user_kernel = user_kernel
        self.policy = policy
        self.options = options
        self.inter = self._build_inter_cache()

    def _build_inter_cache(self) -> InterLaplaceCache:
        p = self.params
        near = 1e-3 * min(self.kernel.scale, 1.0 / math.sqrt(math.pi * p.lambda_m))
        far = max(p.macro_reach, 3 * self.user_kernel.tail_radius + self.kernel.tail_radius)
        s_min = p.beta * near**p.alpha / max(p.p_m, p.p_s)
        s_max = p.beta * far**p.alpha / min(p.p_m, p.p_s)
        return InterLaplaceCache(p, self.kernel, s_min, s_max, self.options.inter_cache_nodes)

    def _inner_range(self, tier: Tier, nu0: float) -> tuple[float, float, tuple[float, ...]]:
        p = self.params
        s = self.kernel.scale
        window_hi = nu0 + self.kernel.tail_radius
        if tier is Tier.MACRO:
            if self.policy is AssociationPolicy.P1:
                points = macro_breakpoints(p, self.kernel, nu0)
            else:
                points = (1.0 / math.sqrt(math.pi * p.lambda_m),)
            return 0.0, p.macro_reach, points
        points = (max(nu0 - 3 * s, 0.0), nu0, nu0 + 3 * s, s)
        if self.policy is AssociationPolicy.P1:
            points += (p.xi_sm / math.sqrt(math.pi * p.lambda_m),)
            return 0.0, window_hi, points
        return 0.0, min(p.distance_threshold, window_hi), points

    def _integrand(self, tier: Tier, nu0: float):
        p = self.params
        power = p.p_m if tier is Tier.MACRO else p.p_s

        def integrand(x: float) -> float:
            joint = serving_joint_density(p, self.kernel, self.policy, tier, x, nu0)
            if joint == 0.0:
                return 0.0
            s = p.beta * x**p.alpha / power
            ctx = LaplaceContext(p, self.kernel, self.policy, tier, nu0, x, self.options.mode)
            return (
                joint
                * laplace_intra(ctx, s)
                * self.inter(s)
                * laplace_macro(p, self.policy, tier, s, x)
            )

        return integrand

    def tier_at(self, tier: Tier, nu0: float) -> tuple[float, float]:
        """(∫ A_j f_Xj L dx, A_j(ν0)) at ν0."""
        lo, hi, points = self._inner_range(tier, nu0)
        covered = 0.0
        if hi > lo:
            try:
                covered = integrate(
                    self._integrand(tier, nu0),
                    lo,
                    hi,
                    self.options.quadrature,
                    points=points,
                    label=f"coverage[{self.policy.value}/{tier.value}] x-integral at nu0={nu0:.6g}",
                )
            except AccuracyNotReachedError:
                logger.error(
                    "coverage_inner_not_converged",
                    policy=self.policy.value,
                    tier=tier.value,
                    nu0=nu0,
                )
                raise
        return covered, assoc_prob(self.params, self.kernel, self.policy, nu0, tier)

    def node_values(self, nu0: float) -> tuple[float, float, float, float]:
        cm, am = self.tier_at(Tier.MACRO, nu0)
        cs, as_ = self.tier_at(Tier.SMALL, nu0)
        return cm, cs, am, as_

    def solve(self) -> tuple[TierValues, TierValues]:
        if self.options.outer_rule is OuterRule.ADAPTIVE:
            return self._solve_adaptive()
        nodes, weights = outer_rule_nodes(self.user_kernel, self.options.outer_nodes)
        if self.options.workers > 1:
            with ThreadPoolExecutor(max_workers=self.options.workers) as pool:
                values = list(pool.map(self.node_values, map(float, nodes)))
        else:
            values = [self.node_values(float(nu)) for nu in nodes]
        # 노드 순서 고정 합산 — 병렬도와 무관하게 같은 비트
        columns = list(zip(*values))
        sums = [math.fsum(float(w) * v for w, v in zip(weights, col)) for col in columns]
        return TierValues(macro=sums[0], small=sums[1]), TierValues(macro=sums[2], small=sums[3])

    def _solve_adaptive(self) -> tuple[TierValues, TierValues]:
        uk = self.user_kernel
        spec = self.options.quadrature
        hi = uk.support_radius
        memo: dict[float, tuple[float, float, float, float]] = {}

        def at(nu0: float) -> tuple[float, float, float, float]:
            if nu0 not in memo:
                memo[nu0] = self.node_values(nu0)
            return memo[nu0]

        def averaged(index: int):
            def g(nu0: float) -> float:
                if nu0 == 0.0:
                    return 0.0
                return at(nu0)[index] * user_center_distance_pdf(uk, nu0)

            return integrate(g, 0.0, hi, spec, points=(uk.scale, 3 * uk.scale), label="outer_nu0")

        cm, cs, am, as_ = (averaged(i) for i in range(4))
        return TierValues(macro=cm, small=cs), TierValues(macro=am, small=as_)


def _clip_probability(value: float) -> float:
    return min(1.0, max(0.0, value))


def _coverage(
    params: NetworkParams,
    kernel: ClusterKernel,
    policy: AssociationPolicy,
    mode: LaplaceMode | None,
    user_kernel: ClusterKernel | None,
    options: CoverageOptions | None,
) -> CoverageReport:
    opts = options or DEFAULT_OPTIONS
    if mode is not None and mode is not opts.mode:
        opts = opts.model_copy(update={"mode": mode})
    uk = user_kernel or ClusterKernel.gaussian(params.sigma_u)
    problem = _CoverageProblem(params, kernel, uk, policy, opts)
    raw_cov, raw_assoc = problem.solve()
    cov = TierValues(macro=_clip_probability(raw_cov.macro), small=_clip_probability(raw_cov.small))
    assoc = TierValues(
        macro=_clip_probability(raw_assoc.macro), small=_clip_probability(raw_assoc.small)
    )
    logger.debug(
        "coverage_evaluated",
        policy=policy.value,
        mode=opts.mode.value,
        macro=cov.macro,
        small=cov.small,
    )
    return CoverageReport(
        policy=policy,
        per_tier_coverage=cov,
        total_coverage=cov.total,
        assoc_prob_avg=assoc,
        throughput=throughput(params, cov.macro, cov.small, policy),
        provenance=Provenance(kind=ProvenanceKind.ANALYTIC, mode=opts.mode),
    )


def coverage_policy1(
    params: NetworkParams,
    kernel: ClusterKernel,
    mode: LaplaceMode | None = None,
    *,
    user_kernel: ClusterKernel | None = None,
    options: CoverageOptions | None = None,
) -> CoverageReport:
    """정책 P1(최대 수신전력) 커버리지."""
    return _coverage(params, kernel, AssociationPolicy.P1, mode, user_kernel, options)


def coverage_policy2(
    params: NetworkParams,
    kernel: ClusterKernel,
    mode: LaplaceMode | None = None,
    *,
    user_kernel: ClusterKernel | None = None,
    options: CoverageOptions | None = None,
) -> CoverageReport:
    """정책 P2(거리 임계값 D) 커버리지. params.p_0 가 필요하다."""
    return _coverage(params, kernel, AssociationPolicy.P2, mode, user_kernel, options)


def coverage(
    params: NetworkParams,
    kernel: ClusterKernel,
    policy: AssociationPolicy,
    mode: LaplaceMode | None = None,
    *,
    user_kernel: ClusterKernel | None = None,
    options: CoverageOptions | None = None,
) -> CoverageReport:
    return _coverage(params, kernel, policy, mode, user_kernel, options)


# ─── 최적 임계값 ─────────────────────────────────────


def optimal_threshold(
    params: NetworkParams,
    kernel: ClusterKernel,
    d_grid: Sequence[float],
    mode: LaplaceMode | None = None,
    *,
    user_kernel: ClusterKernel | None = None,
    options: CoverageOptions | None = None,
) -> tuple[float, float]:
    """P2 총 커버리지를 최대화하는 D* 와 그 커버리지.

    격자 argmax (동률은 작은 D) 후, 최적점이 내부면 이웃 격자점 사이에서
    황금분할 탐색을 한 번 돌린다. 정제 결과가 더 나쁘면 격자값을 유지한다.
    """
    grid = [float(d) for d in d_grid]
    if not grid:
        raise NumericsDomainError("d_grid 가 비어 있습니다")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise NumericsDomainError("d_grid 는 순증가해야 합니다")

    def total_at(d: float) -> float:
        report = coverage_policy2(
            params.with_distance_threshold(d),
            kernel,
            mode,
            user_kernel=user_kernel,
            options=options,
        )
        return report.total_coverage

    values = [total_at(d) for d in grid]
    best = int(np.argmax(values))  # 첫 최대값 = 가장 작은 D
    d_best, c_best = grid[best], values[best]
    if 0 < best < len(grid) - 1:
        try:
            result = minimize_scalar(
                lambda d: -total_at(d),
                bracket=(grid[best - 1], d_best, grid[best + 1]),
                method="golden",
                options={"xtol": 1e-3, "maxiter": 12},
            )
        except (ValueError, RuntimeError):
            # 이웃과 동률이면 브래킷이 성립하지 않는다
            logger.debug("optimal_threshold_refinement_skipped", d_best=d_best)
        else:
            refined = float(result.x)
            if grid[best - 1] <= refined <= grid[best + 1] and -float(result.fun) > c_best:
                d_best, c_best = refined, -float(result.fun)
    logger.debug("optimal_threshold", d_star=d_best, coverage=c_best, grid_points=len(grid))
    return d_best, c_best
