"""몬테카를로 커버리지 엔진 — 해석 파이프라인의 독립 기준값.

simulate_coverage 흐름:
  SeedSequence(seed).spawn(배치 수 + 1) → 배치별 default_rng
  → sample_batch → _evaluate_batch (연결/활성집합/페이딩/SIR) → CoverageTally 합산
  → 창 크기 점검 (별도 하위 스트림) → CoverageReport (Wilson 95% 구간)

같은 (seed, batch_size) 면 결과는 worker 수에 무관하다 (배치 시드가 인덱스로 정해짐).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import structlog
from scipy.stats import binomtest

from hetpcp.analysis.active_set import sample_truncated_poisson
from hetpcp.analysis.association import exclusion_radius
from hetpcp.analysis.coverage import throughput
from hetpcp.geometry.kernel import ClusterKernel
from hetpcp.models.params import AssociationPolicy, NetworkParams, Tier
from hetpcp.models.report import CoverageReport, Provenance, ProvenanceKind, TierValues
from hetpcp.simulation.sampler import (
    RealizationBatch,
    SimConfig,
    associate,
    check_exclusion,
    disk_ppp,
    draw_active_mask,
    sample_batch,
)

logger = structlog.get_logger()

# 바깥 고리가 평균 간섭에서 차지하는 비율 경고 임계값
WINDOW_RING_SHARE_LIMIT = 1e-3


@dataclass
class CoverageTally:
    trials: int = 0
    macro_assoc: int = 0
    small_assoc: int = 0
    macro_hits: int = 0
    small_hits: int = 0

    def __add__(self, other: CoverageTally) -> CoverageTally:
        return CoverageTally(
            self.trials + other.trials,
            self.macro_assoc + other.macro_assoc,
            self.small_assoc + other.small_assoc,
            self.macro_hits + other.macro_hits,
            self.small_hits + other.small_hits,
        )


def wilson_half_width(hits: int, trials: int) -> float:
    """95% Wilson 구간의 반폭."""
    ci = binomtest(hits, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return 0.5 * (ci.high - ci.low)


def _evaluate_batch(
    params: NetworkParams,
    policy: AssociationPolicy,
    batch: RealizationBatch,
    rng: np.random.Generator,
) -> CoverageTally:
    size = batch.size
    rows = np.arange(size)
    alpha = params.alpha

    nearest = np.argmin(batch.rep_dist, axis=1)
    r_s = batch.rep_dist[rows, nearest]
    r_m, macro_index = batch.nearest_macro()
    small = associate(params, policy, r_m, r_s)

    _, active = draw_active_mask(params, small, nearest, rng)
    interferers = active.copy()
    interferers[rows[small], nearest[small]] = False
    serving_distance = np.where(small, r_s, r_m)
    check_exclusion(
        params, policy, small, serving_distance, batch.rep_dist, interferers, nearest_macro=r_m
    )

    # 대표 클러스터 (서빙 SBS 의 페이딩도 같은 배열에서 꺼낸다)
    rep_fading = rng.exponential(1.0, batch.rep_dist.shape)
    rep_power = params.p_s * rep_fading * batch.rep_dist**-alpha
    intra = np.where(interferers, rep_power, 0.0).sum(axis=1)

    # MBS
    macro_fading = rng.exponential(1.0, batch.macro_trial.shape[0])
    macro_power = params.p_m * macro_fading * batch.macro_dist**-alpha
    serving_macro = np.zeros(batch.macro_trial.shape[0], dtype=bool)
    macro_rows = np.flatnonzero(~small & (macro_index >= 0))
    serving_macro[macro_index[macro_rows]] = True
    macro_interference = np.bincount(
        batch.macro_trial, weights=np.where(serving_macro, 0.0, macro_power), minlength=size
    )

    # 다른 클러스터
    inter_pts = batch.inter_points
    inter_dist = np.hypot(inter_pts[:, 0], inter_pts[:, 1])
    inter_fading = rng.exponential(1.0, inter_dist.shape[0])
    inter = np.bincount(
        batch.inter_trial, weights=params.p_s * inter_fading * inter_dist**-alpha, minlength=size
    )

    signal = np.zeros(size)
    signal[small] = rep_power[rows[small], nearest[small]]
    signal[macro_rows] = macro_power[macro_index[macro_rows]]
    covered = signal > params.beta * (intra + macro_interference + inter)

    return CoverageTally(
        trials=size,
        macro_assoc=int((~small).sum()),
        small_assoc=int(small.sum()),
        macro_hits=int((covered & ~small).sum()),
        small_hits=int((covered & small).sum()),
    )


def window_ring_share(
    params: NetworkParams,
    kernel: ClusterKernel,
    user_kernel: ClusterKernel,
    sim: SimConfig,
    rng: np.random.Generator,
) -> float:
    """창을 두 배로 키운 표본에서 [R, 2R] 고리가 평균 간섭에 기여하는 비율 (페이딩 평균)."""
    trials = sim.window_check_trials
    radius = sim.window_radius
    batch = sample_batch(params, kernel, user_kernel, trials, 2.0 * radius, rng)
    alpha = params.alpha

    r_m, macro_index = batch.nearest_macro()
    macro_power = params.p_m * batch.macro_dist**-alpha
    macro_power[macro_index[macro_index >= 0]] = 0.0
    macro_ring = batch.macro_dist > radius

    inter_pts = batch.inter_points
    inter_power = params.p_s * np.hypot(inter_pts[:, 0], inter_pts[:, 1]) ** -alpha
    parent_dist = np.hypot(batch.parent_points[:, 0], batch.parent_points[:, 1])
    inter_ring = parent_dist[batch.inter_parent] > radius

    rep_sorted = np.sort(batch.rep_dist, axis=1)[:, 1:]
    intra = params.nbar_as / params.n_s0 * params.p_s * np.sum(rep_sorted**-alpha)

    ring = macro_power[macro_ring].sum() + inter_power[inter_ring].sum()
    total = macro_power.sum() + inter_power.sum() + intra
    return float(ring / total) if total > 0 else 0.0


def simulate_tally(
    params: NetworkParams,
    kernel: ClusterKernel,
    policy: AssociationPolicy,
    sim: SimConfig,
    *,
    user_kernel: ClusterKernel | None = None,
) -> CoverageTally:
    uk = user_kernel or ClusterKernel.gaussian(params.sigma_u)
    if policy is AssociationPolicy.P2:
        _ = params.distance_threshold
    n_batches = math.ceil(sim.trials / sim.batch_size)
    seeds = np.random.SeedSequence(sim.seed).spawn(n_batches + 1)
    sizes = [sim.batch_size] * (n_batches - 1) + [sim.trials - sim.batch_size * (n_batches - 1)]

    def run(index: int) -> CoverageTally:
        rng = np.random.default_rng(seeds[index])
        batch = sample_batch(params, kernel, uk, sizes[index], sim.window_radius, rng)
        return _evaluate_batch(params, policy, batch, rng)

    if sim.workers > 1:
        with ThreadPoolExecutor(max_workers=sim.workers) as pool:
            tallies = list(pool.map(run, range(n_batches)))
    else:
        tallies = [run(i) for i in range(n_batches)]

    if sim.window_check_trials:
        share = window_ring_share(params, kernel, uk, sim, np.random.default_rng(seeds[-1]))
        if share > WINDOW_RING_SHARE_LIMIT:
            logger.warning(
                "window_too_small",
                window_radius_km=sim.window_radius,
                ring_share=share,
                limit=WINDOW_RING_SHARE_LIMIT,
            )

    total = CoverageTally()
    for tally in tallies:
        total = total + tally
    return total


def simulate_coverage(
    params: NetworkParams,
    kernel: ClusterKernel,
    policy: AssociationPolicy,
    sim: SimConfig,
    *,
    user_kernel: ClusterKernel | None = None,
) -> CoverageReport:
    """몬테카를로 커버리지 추정."""
    tally = simulate_tally(params, kernel, policy, sim, user_kernel=user_kernel)
    n = tally.trials
    cov_m = tally.macro_hits / n
    cov_s = tally.small_hits / n
    hits = tally.macro_hits + tally.small_hits
    logger.debug(
        "simulation_finished",
        policy=policy.value,
        trials=n,
        macro_hits=tally.macro_hits,
        small_hits=tally.small_hits,
    )
    return CoverageReport(
        policy=policy,
        per_tier_coverage=TierValues(macro=cov_m, small=cov_s),
        total_coverage=hits / n,
        assoc_prob_avg=TierValues(macro=tally.macro_assoc / n, small=tally.small_assoc / n),
        throughput=throughput(params, cov_m, cov_s, policy),
        provenance=Provenance(
            kind=ProvenanceKind.SIMULATED,
            trials=n,
            seed=sim.seed,
            half_width_95=wilson_half_width(hits, n),
            tier_half_width_95=TierValues(
                macro=wilson_half_width(tally.macro_hits, n),
                small=wilson_half_width(tally.small_hits, n),
            ),
        ),
    )


# ─── 중간 법칙 추정기 (교차검증용) ───────────────────


def _conditioned_distances(
    kernel: ClusterKernel,
    nu0: float,
    lower: float,
    shape: tuple[int, int],
    rng: np.random.Generator,
) -> np.ndarray:
    """중심 (ν0, 0) 클러스터 SBS 거리를 lower 초과로 조건부 표본 (기각 샘플링)."""
    need = shape[0] * shape[1]
    kept: list[np.ndarray] = []
    have = 0
    while have < need:
        off = kernel.sample_offsets(rng, max(2 * (need - have), 1024))
        dist = np.hypot(off[:, 0] + nu0, off[:, 1])
        dist = dist[dist > lower]
        kept.append(dist)
        have += dist.size
    return np.concatenate(kept)[:need].reshape(shape)


def estimate_assoc_prob(
    params: NetworkParams,
    kernel: ClusterKernel,
    policy: AssociationPolicy,
    nu0: float,
    trials: int,
    rng: np.random.Generator,
) -> TierValues:
    """ν0 고정 조건에서 tier 연결 빈도."""
    off = kernel.sample_offsets(rng, (trials, params.n_s0))
    r_s = np.hypot(off[..., 0] + nu0, off[..., 1]).min(axis=1)
    r_m = np.sqrt(rng.exponential(1.0, trials) / (math.pi * params.lambda_m))
    small = associate(params, policy, r_m, r_s)
    p_small = float(small.mean())
    return TierValues(macro=1.0 - p_small, small=p_small)


def estimate_nearest_sbs_cdf(
    params: NetworkParams,
    kernel: ClusterKernel,
    nu0: float,
    r: float,
    trials: int,
    rng: np.random.Generator,
) -> float:
    off = kernel.sample_offsets(rng, (trials, params.n_s0))
    r_s = np.hypot(off[..., 0] + nu0, off[..., 1]).min(axis=1)
    return float((r_s <= r).mean())


def estimate_laplace_intra(
    params: NetworkParams,
    kernel: ClusterKernel,
    policy: AssociationPolicy,
    tier: Tier,
    nu0: float,
    x: float,
    s: float,
    trials: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """(평균, 표준오차) of E[exp(−s·I_intra) | ν0, x] — 페이딩은 해석적으로 평균.

    서빙 거리 x 조건부로 다른 SBS 는 배제 반경 밖 i.i.d., 활성 수는 절단 Poisson.
    """
    small = tier is Tier.SMALL
    others = params.n_s0 - 1 if small else params.n_s0
    lower = exclusion_radius(params, policy, tier, x)
    counts = sample_truncated_poisson(params.nbar_as, params.n_s0, small, rng, trials)
    interferers = counts - 1 if small else counts
    if others == 0:
        return 1.0, 0.0
    dist = _conditioned_distances(kernel, nu0, lower, (trials, others), rng)
    factors = 1.0 / (1.0 + s * params.p_s * dist**-params.alpha)
    use = np.arange(others)[None, :] < interferers[:, None]
    values = np.where(use, factors, 1.0).prod(axis=1)
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(trials))


def estimate_laplace_inter(
    params: NetworkParams,
    kernel: ClusterKernel,
    s: float,
    trials: int,
    window_radius: float,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """(평균, 표준오차) of E[exp(−s·I_inter)] — 페이딩은 해석적으로 평균."""
    parents, parent_trial = disk_ppp(params.lambda_p, window_radius, trials, rng)
    per_parent = rng.poisson(params.nbar_as, parents.shape[0])
    parent_index = np.repeat(np.arange(parents.shape[0]), per_parent)
    pts = parents[parent_index] + kernel.sample_offsets(rng, int(per_parent.sum()))
    dist = np.hypot(pts[:, 0], pts[:, 1])
    log_terms = -np.log1p(s * params.p_s * dist**-params.alpha)
    values = np.exp(np.bincount(parent_trial[parent_index], weights=log_terms, minlength=trials))
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(trials))
