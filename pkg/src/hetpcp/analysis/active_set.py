"""대표 클러스터 활성 SBS 수의 절단 Poisson 법칙.

  macro 서빙: P(L=ℓ) ∝ n̄^ℓ/ℓ!,          ℓ = 0..n_s0
  small 서빙: P(L=ℓ) ∝ n̄^(ℓ−1)/(ℓ−1)!,  ℓ = 1..n_s0  (서빙 SBS 자신이 하나 포함)

가중치는 로그 공간에서 정규화한다.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln, logsumexp, xlogy

from hetpcp.errors import NumericsDomainError


def active_count_pmf(
    nbar: float, n_max: int, *, conditioned_on_serving: bool
) -> tuple[np.ndarray, np.ndarray]:
    """(support, pmf). support 는 활성 SBS 총수 ℓ."""
    if not nbar >= 0:
        raise NumericsDomainError(f"nbar 는 0 이상이어야 합니다: {nbar!r}")
    if n_max < 1:
        raise NumericsDomainError(f"n_max 는 1 이상이어야 합니다: {n_max!r}")
    offset = 1 if conditioned_on_serving else 0
    support = np.arange(offset, n_max + 1)
    k = support - offset
    log_w = xlogy(k, nbar) - gammaln(k + 1)
    pmf = np.exp(log_w - logsumexp(log_w))
    return support, pmf


def sample_truncated_poisson(
    nbar: float,
    n_max: int,
    conditioned_on_serving: bool,
    rng: np.random.Generator,
    size: int | None = None,
) -> int | np.ndarray:
    """절단 Poisson 표본 (역 CDF)."""
    support, pmf = active_count_pmf(nbar, n_max, conditioned_on_serving=conditioned_on_serving)
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    u = rng.random() if size is None else rng.random(size)
    idx = np.searchsorted(cdf, u, side="right")
    draws = support[np.minimum(idx, support.size - 1)]
    return int(draws) if size is None else draws
