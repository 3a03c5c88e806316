"""구적법 계층 — 해석 공식의 모든 적분이 이 모듈을 통과한다.

두 가지 규칙을 제공한다.

  integrate()        QUADPACK(scipy.integrate.quad) 적응 Gauss–Kronrod.
                     반무한 구간 [lo, ∞)는 t = lo + scale·u/(1−u) 로 [0, 1)에 사상하므로
                     꼬리를 임의로 잘라내지 않는다. 허용오차 미달은 예외로 알린다.
  integrate_fixed()  구간을 breakpoint 로 나눈 복합 Gauss–Legendre (벡터화).
                     밀도가 컴팩트 창 안에 몰린 내부 적분(Rician 창 등)용.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable
from enum import Enum
from functools import lru_cache

import numpy as np
import structlog
from numpy.polynomial.legendre import leggauss
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate as sp_integrate

from hetpcp.errors import AccuracyNotReachedError, IntegrandEvaluationError, NumericsDomainError

logger = structlog.get_logger()


class TailPolicy(str, Enum):
    """반무한 구간 처리 방식."""

    SUBSTITUTION = "substitution"  # t = lo + scale·u/(1−u)
    QUADPACK = "quadpack"  # scipy 내장 무한구간 변환 (QAGI)


class QuadratureSpec(BaseModel):
    """적분 허용오차/분할 설정."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    relative_tolerance: float = Field(default=1e-8, gt=0)
    absolute_tolerance: float = Field(default=1e-12, gt=0)
    max_subdivisions: int = Field(default=200, ge=1)
    upper_truncation_policy: TailPolicy = TailPolicy.SUBSTITUTION


DEFAULT_QUADRATURE = QuadratureSpec()


def _checked(f: Callable[[float], float]) -> Callable[[float], float]:
    def wrapped(t: float) -> float:
        value = f(t)
        if math.isnan(value):
            raise IntegrandEvaluationError(t, value)
        return value

    return wrapped


def integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    *,
    scale: float = 1.0,
    points: Iterable[float] | None = None,
    label: str = "integral",
) -> float:
    """∫_lo^hi f(t) dt.

    hi 가 ∞ 이면 scale 은 피적분 함수가 의미 있게 변하는 길이 척도 힌트다.
    points 는 유한 구간에서만 쓰이며 구간 밖의 값은 무시된다.

    Raises:
        NumericsDomainError: lo ≥ hi, 비유한 lo, scale ≤ 0
        AccuracyNotReachedError: QUADPACK 이 허용오차를 만족하지 못함
        IntegrandEvaluationError: 피적분 함수가 NaN 을 반환
    """
    if not math.isfinite(lo):
        raise NumericsDomainError(f"적분 하한은 유한해야 합니다: {lo!r}")
    if not lo < hi:
        raise NumericsDomainError(f"적분 구간이 비어 있습니다: [{lo!r}, {hi!r}]")
    if scale <= 0:
        raise NumericsDomainError(f"scale 은 양수여야 합니다: {scale!r}")

    g = _checked(f)
    a, b = lo, hi
    breaks: list[float] | None = None

    if math.isinf(hi):
        if spec.upper_truncation_policy is TailPolicy.SUBSTITUTION:

            def mapped(u: float) -> float:
                rest = 1.0 - u
                return g(lo + scale * u / rest) * scale / (rest * rest)

            g, a, b = mapped, 0.0, 1.0
    elif points is not None:
        breaks = sorted({p for p in points if lo < p < hi}) or None

    result = sp_integrate.quad(
        g,
        a,
        b,
        epsabs=spec.absolute_tolerance,
        epsrel=spec.relative_tolerance,
        limit=spec.max_subdivisions,
        points=breaks,
        full_output=1,
    )
    value, abserr = float(result[0]), float(result[1])
    if len(result) > 3:
        target = max(spec.absolute_tolerance, spec.relative_tolerance * abs(value))
        if not abserr <= target:
            raise AccuracyNotReachedError(
                f"{label}: {result[3]}", estimate=value, abserr=abserr
            )
        logger.debug("quadrature_warning_within_tolerance", label=label, abserr=abserr)
    return value


# ─── 고정 규칙 ───────────────────────────────────────


@lru_cache(maxsize=16)
def legendre_rule(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """[-1, 1] 위 Gauss–Legendre 노드/가중치."""
    if nodes < 1:
        raise NumericsDomainError(f"노드 수는 1 이상이어야 합니다: {nodes}")
    x, w = leggauss(nodes)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def integrate_fixed(
    f: Callable[[np.ndarray], np.ndarray],
    breakpoints: Iterable[float],
    nodes_per_panel: int = 48,
) -> float:
    """정렬된 breakpoint 사이 각 패널에 Gauss–Legendre 를 적용한 합.

    f 는 노드 배열을 받아 같은 모양의 배열을 돌려주는 벡터 함수여야 한다.
    """
    edges = np.unique(np.asarray(list(breakpoints), dtype=float))
    if edges.size < 2:
        return 0.0
    x, w = legendre_rule(nodes_per_panel)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = mid[:, None] + half[:, None] * x[None, :]
    values = np.asarray(f(t.ravel()), dtype=float).reshape(t.shape)
    if np.isnan(values).any():
        bad = int(np.flatnonzero(np.isnan(values.ravel()))[0])
        raise IntegrandEvaluationError(float(t.ravel()[bad]), math.nan)
    return float(np.sum(half * (values @ w)))
