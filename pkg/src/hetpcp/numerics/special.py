"""특수 함수 — I0, 1차 Marcum Q, sinc.

Marcum Q1 은 정의 적분 Q1(a, b) = ∫_b^∞ t·exp(−(t²+a²)/2)·I0(at) dt 를
지수 스케일 Bessel(i0e) 로 다시 쓴 피적분 함수로 직접 구적한다.
  t·exp(−(t−a)²/2)·i0e(at)
b ≤ a 이면 1 − ∫_0^b, 그렇지 않으면 꼬리 ∫_b^∞ 를 바로 적분해 상쇄 오차를 피한다.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from hetpcp.errors import NumericsDomainError
from hetpcp.numerics.quadrature import QuadratureSpec, integrate

# 꼬리 확률이 아주 작아도 상대 정밀도를 유지하도록 절대 허용오차를 사실상 끈다
_MARCUM_QUADRATURE = QuadratureSpec(relative_tolerance=1e-11, absolute_tolerance=1e-300)


def _require_nonnegative(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise NumericsDomainError(f"{name} 은(는) 유한해야 합니다: {value!r}")
    if value < 0:
        raise NumericsDomainError(f"{name} 은(는) 0 이상이어야 합니다: {value!r}")


def bessel_i0(x: float) -> float:
    """1종 0차 수정 Bessel 함수. x ≳ 713 에서는 float 범위를 넘어 inf."""
    _require_nonnegative("x", x)
    if x < 700.0:
        return float(special.i0(x))
    with np.errstate(over="ignore"):
        return float(np.exp(x) * special.i0e(x))


def bessel_i0e(x: float) -> float:
    """exp(−x)·I0(x). 모든 x ≥ 0 에서 유한."""
    _require_nonnegative("x", x)
    return float(special.i0e(x))


def _marcum_density(a: float):
    def density(t: float) -> float:
        d = t - a
        return t * math.exp(-0.5 * d * d) * float(special.i0e(a * t))

    return density


def marcum_q1(a: float, b: float) -> float:
    """1차 Marcum Q 함수 Q1(a, b) ∈ [0, 1].

    Q1(a, 0) = 1, Q1(0, b) = exp(−b²/2).
    """
    _require_nonnegative("a", a)
    _require_nonnegative("b", b)
    if b == 0.0:
        return 1.0
    if a == 0.0:
        return math.exp(-0.5 * b * b)
    density = _marcum_density(a)
    if b <= a:
        head = integrate(
            density, 0.0, b, _MARCUM_QUADRATURE, points=(a - 6.0, a), label="marcum_q1_head"
        )
        return min(1.0, max(0.0, 1.0 - head))
    tail = integrate(density, b, math.inf, _MARCUM_QUADRATURE, scale=1.0, label="marcum_q1_tail")
    return min(1.0, max(0.0, tail))


def sinc_alpha(alpha: float) -> float:
    """sinc(2/α) = sin(2π/α)/(2π/α), α > 2."""
    if not alpha > 2:
        raise NumericsDomainError("alpha must exceed 2")
    return float(np.sinc(2.0 / alpha))
