"""수치 기반 — 특수 함수와 구적법."""

from hetpcp.numerics.quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    TailPolicy,
    integrate,
    integrate_fixed,
)
from hetpcp.numerics.special import bessel_i0, bessel_i0e, marcum_q1, sinc_alpha

__all__ = [
    "DEFAULT_QUADRATURE",
    "QuadratureSpec",
    "TailPolicy",
    "bessel_i0",
    "bessel_i0e",
    "integrate",
    "integrate_fixed",
    "marcum_q1",
    "sinc_alpha",
]
