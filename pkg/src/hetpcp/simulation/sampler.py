"""네트워크 실현(realization) 샘플러.

원점의 전형적 사용자 기준으로 한 배치(B 시행)를 한꺼번에 뽑는다.
  - 대표 클러스터: 중심 (V0, 0), V0 = ‖사용자 커널 표본‖, n_s0 개 SBS 오프셋 (창 밖으로도 잘리지 않음)
  - MBS / 다른 클러스터 중심: 반경 R 원판 위 PPP
  - 다른 클러스터: 각 중심마다 Poisson(n̄) 개 활성 SBS (절단 없음)
가변 길이 점 집합은 (points, trial 인덱스) 평탄 배열로 보관하고 np.bincount 로 시행별 합을 낸다.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from hetpcp.analysis.active_set import sample_truncated_poisson
from hetpcp.analysis.association import exclusion_radius
from hetpcp.errors import AssociationInvariantError
from hetpcp.geometry.kernel import ClusterKernel
from hetpcp.models.params import AssociationPolicy, NetworkParams, Tier


class SimConfig(BaseModel):
    """몬테카를로 설정. 같은 (seed, 설정) 은 같은 출력 스트림을 만든다."""

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    trials: int = Field(default=100_000, ge=1)
    seed: int = Field(default=20_240_601, ge=0, lt=2**64)
    window_radius: float = Field(default=3.0, gt=0, alias="window_radius_km")
    batch_size: int = Field(default=1_000, ge=1)
    workers: int = Field(default=1, ge=1)
    window_check_trials: int = Field(default=200, ge=0)


# ─── 배치 ────────────────────────────────────────────


def disk_ppp(
    density: float, radius: float, size: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """시행 size 개 각각에 원판 PPP. (points (M,2), trial (M,))."""
    counts = rng.poisson(density * math.pi * radius * radius, size)
    total = int(counts.sum())
    rho = radius * np.sqrt(rng.random(total))
    theta = rng.uniform(0.0, 2.0 * math.pi, total)
    points = np.column_stack((rho * np.cos(theta), rho * np.sin(theta)))
    return points, np.repeat(np.arange(size), counts)


@dataclass
class RealizationBatch:
    """B 개 시행의 점 배치 (페이딩/활성 집합 제외)."""

    size: int
    center: np.ndarray  # (B, 2)
    rep_offsets: np.ndarray  # (B, n_s0, 2)
    rep_dist: np.ndarray  # (B, n_s0)
    macro_points: np.ndarray  # (M, 2)
    macro_trial: np.ndarray  # (M,)
    parent_points: np.ndarray  # (K, 2)
    parent_trial: np.ndarray  # (K,)
    inter_offsets: np.ndarray  # (S, 2)
    inter_parent: np.ndarray  # (S,)

    @property
    def macro_dist(self) -> np.ndarray:
        return np.hypot(self.macro_points[:, 0], self.macro_points[:, 1])

    @property
    def inter_points(self) -> np.ndarray:
        return self.parent_points[self.inter_parent] + self.inter_offsets

    @property
    def inter_trial(self) -> np.ndarray:
        return self.parent_trial[self.inter_parent]

    def nearest_macro(self) -> tuple[np.ndarray, np.ndarray]:
        """(시행별 최근접 MBS 거리 (없으면 inf), 그 점의 평탄 인덱스 (없으면 −1))."""
        dist = self.macro_dist
        order = np.lexsort((dist, self.macro_trial))
        counts = np.bincount(self.macro_trial, minlength=self.size)
        starts = np.cumsum(counts) - counts
        present = counts > 0
        index = np.full(self.size, -1)
        index[present] = order[starts[present]]
        r_m = np.full(self.size, np.inf)
        r_m[present] = dist[index[present]]
        return r_m, index


def sample_batch(
    params: NetworkParams,
    kernel: ClusterKernel,
    user_kernel: ClusterKernel,
    size: int,
    window_radius: float,
    rng: np.random.Generator,
) -> RealizationBatch:
    user = user_kernel.sample_offsets(rng, size)
    v0 = np.hypot(user[:, 0], user[:, 1])
    center = np.column_stack((v0, np.zeros(size)))
    rep_offsets = kernel.sample_offsets(rng, (size, params.n_s0))
    rep_pos = center[:, None, :] + rep_offsets
    rep_dist = np.hypot(rep_pos[..., 0], rep_pos[..., 1])
    macro_points, macro_trial = disk_ppp(params.lambda_m, window_radius, size, rng)
    parent_points, parent_trial = disk_ppp(params.lambda_p, window_radius, size, rng)
    per_parent = rng.poisson(params.nbar_as, parent_points.shape[0])
    inter_parent = np.repeat(np.arange(parent_points.shape[0]), per_parent)
    inter_offsets = kernel.sample_offsets(rng, int(per_parent.sum()))
    return RealizationBatch(
        size=size,
        center=center,
        rep_offsets=rep_offsets,
        rep_dist=rep_dist,
        macro_points=macro_points,
        macro_trial=macro_trial,
        parent_points=parent_points,
        parent_trial=parent_trial,
        inter_offsets=inter_offsets,
        inter_parent=inter_parent,
    )


# ─── 연결과 활성 집합 ────────────────────────────────


def associate(
    params: NetworkParams, policy: AssociationPolicy, r_m: np.ndarray, r_s: np.ndarray
) -> np.ndarray:
    """small 서빙 여부 (bool 배열). P1: P_s R_s^−α ≥ P_m R_m^−α, P2: R_s ≤ D."""
    if policy is AssociationPolicy.P1:
        return r_s <= params.xi_sm * r_m
    return r_s <= params.distance_threshold


def draw_active_mask(
    params: NetworkParams,
    small: np.ndarray,
    nearest: np.ndarray,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """(활성 수 L, 활성 마스크 (B, n_s0)).

    macro 서빙은 n_s0 중 L 개를 무작위로, small 서빙은 서빙 SBS 와 나머지 중 L−1 개를 고른다.
    """
    size = small.shape[0]
    n = params.n_s0
    counts = np.empty(size, dtype=int)
    n_small = int(small.sum())
    counts[small] = sample_truncated_poisson(params.nbar_as, n, True, rng, n_small)
    counts[~small] = sample_truncated_poisson(params.nbar_as, n, False, rng, size - n_small)
    keys = rng.random((size, n))
    rows = np.flatnonzero(small)
    keys[rows, nearest[rows]] = -1.0
    ranks = np.argsort(np.argsort(keys, axis=1), axis=1)
    return counts, ranks < counts[:, None]


def check_exclusion(
    params: NetworkParams,
    policy: AssociationPolicy,
    small: np.ndarray,
    serving_distance: np.ndarray,
    interferer_dist: np.ndarray,
    interferer_mask: np.ndarray,
    nearest_macro: np.ndarray | None = None,
) -> None:
    """활성 간섭 SBS 나 MBS 가 배제 반경 안에 있으면 AssociationInvariantError.

    MBS 쪽: P1 small 서빙은 ξ_ms·x 안에 MBS 가 없고, macro 서빙은 서빙 MBS 보다 가까운 MBS 가 없다.
    """
    lower = np.where(
        small,
        exclusion_radius(params, policy, Tier.SMALL, serving_distance),
        exclusion_radius(params, policy, Tier.MACRO, serving_distance),
    )
    closest = np.where(interferer_mask, interferer_dist, np.inf).min(axis=1)
    bad = np.flatnonzero(closest < lower * (1.0 - 1e-12))
    if bad.size:
        i = int(bad[0])
        raise AssociationInvariantError(
            f"시행 {i}: 간섭 SBS 거리 {closest[i]:.6g} km < 배제 반경 {lower[i]:.6g} km"
        )
    if nearest_macro is None:
        return
    if policy is AssociationPolicy.P1:
        macro_lower = np.where(small, params.xi_ms * serving_distance, serving_distance)
    else:
        macro_lower = np.where(small, 0.0, serving_distance)
    bad = np.flatnonzero(nearest_macro < macro_lower * (1.0 - 1e-12))
    if bad.size:
        i = int(bad[0])
        raise AssociationInvariantError(
            f"시행 {i}: MBS 거리 {nearest_macro[i]:.6g} km < 배제 반경 {macro_lower[i]:.6g} km"
        )


# ─── 단일 실현 ───────────────────────────────────────


@dataclass
class NetworkRealization:
    """한 시행의 네트워크. 페이딩은 draw_fading 으로 필요할 때 뽑는다."""

    macro_points: np.ndarray
    parent_points: np.ndarray
    representative_center: np.ndarray
    representative_sbs_offsets: np.ndarray
    representative_active_count: int
    representative_active_mask: np.ndarray
    other_cluster_active_offsets: list[np.ndarray]
    serving_tier: Tier
    serving_distance: float
    window_radius: float
    rng: np.random.Generator = field(repr=False)

    @property
    def representative_sbs_points(self) -> np.ndarray:
        return self.representative_center + self.representative_sbs_offsets

    def _rep_dist(self) -> np.ndarray:
        pts = self.representative_sbs_points
        return np.hypot(pts[:, 0], pts[:, 1])

    def intra_interferer_distances(self) -> np.ndarray:
        dist = self._rep_dist()
        mask = self.representative_active_mask.copy()
        if self.serving_tier is Tier.SMALL:
            mask[int(np.argmin(dist))] = False
        return dist[mask]

    def macro_interferer_distances(self) -> np.ndarray:
        dist = np.sort(np.hypot(self.macro_points[:, 0], self.macro_points[:, 1]))
        return dist[1:] if self.serving_tier is Tier.MACRO else dist

    def inter_interferer_distances(self) -> np.ndarray:
        if not self.other_cluster_active_offsets:
            return np.empty(0)
        pts = np.concatenate(
            [p + off for p, off in zip(self.parent_points, self.other_cluster_active_offsets)]
        )
        return np.hypot(pts[:, 0], pts[:, 1]) if pts.size else np.empty(0)

    def draw_fading(self, size: int) -> np.ndarray:
        """단위 평균 지수분포 (Rayleigh 전력 페이딩)."""
        return self.rng.exponential(1.0, size)

    def sir(self, params: NetworkParams) -> float:
        p_serve = params.p_s if self.serving_tier is Tier.SMALL else params.p_m
        signal = p_serve * self.draw_fading(1)[0] * self.serving_distance ** (-params.alpha)
        interference = 0.0
        for power, dist in (
            (params.p_s, self.intra_interferer_distances()),
            (params.p_s, self.inter_interferer_distances()),
            (params.p_m, self.macro_interferer_distances()),
        ):
            if dist.size:
                fading = self.draw_fading(dist.size)
                interference += float(np.sum(power * fading * dist ** -params.alpha))
        return math.inf if interference == 0.0 else signal / interference


def sample_realization(
    params: NetworkParams,
    kernel: ClusterKernel,
    policy: AssociationPolicy,
    sim: SimConfig,
    rng: np.random.Generator,
    *,
    user_kernel: ClusterKernel | None = None,
) -> NetworkRealization:
    """정책을 적용한 네트워크 실현 하나."""
    uk = user_kernel or ClusterKernel.gaussian(params.sigma_u)
    batch = sample_batch(params, kernel, uk, 1, sim.window_radius, rng)
    r_m, _ = batch.nearest_macro()
    nearest = np.argmin(batch.rep_dist, axis=1)
    r_s = batch.rep_dist[0, nearest]
    small = associate(params, policy, r_m, r_s)
    counts, mask = draw_active_mask(params, small, nearest, rng)
    n_parents = batch.parent_points.shape[0]
    per_parent = np.bincount(batch.inter_parent, minlength=n_parents)
    offsets_by_parent = (
        np.split(batch.inter_offsets, np.cumsum(per_parent)[:-1]) if n_parents else []
    )
    tier = Tier.SMALL if bool(small[0]) else Tier.MACRO
    return NetworkRealization(
        macro_points=batch.macro_points,
        parent_points=batch.parent_points,
        representative_center=batch.center[0],
        representative_sbs_offsets=batch.rep_offsets[0],
        representative_active_count=int(counts[0]),
        representative_active_mask=mask[0],
        other_cluster_active_offsets=list(offsets_by_parent),
        serving_tier=tier,
        serving_distance=float(r_s[0] if tier is Tier.SMALL else r_m[0]),
        window_radius=sim.window_radius,
        rng=rng,
    )
