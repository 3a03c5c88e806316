"""해석 파이프라인 — 연결 확률, 활성 SBS 수, Laplace 변환, 커버리지."""

from hetpcp.analysis.active_set import active_count_pmf, sample_truncated_poisson
from hetpcp.analysis.association import (
    assoc_prob,
    assoc_prob_policy1,
    assoc_prob_policy2,
    exclusion_radius,
    interferer_distance_pdf,
    nearest_sbs_cdf,
    nearest_sbs_pdf,
    nearest_sbs_sf,
    serving_distance_pdf,
)
from hetpcp.analysis.coverage import (
    CoverageOptions,
    OuterRule,
    coverage,
    coverage_policy1,
    coverage_policy2,
    optimal_threshold,
    throughput,
)
from hetpcp.analysis.laplace import (
    InterLaplaceCache,
    LaplaceContext,
    laplace_inter,
    laplace_intra,
    laplace_macro,
)

__all__ = [
    "CoverageOptions",
    "InterLaplaceCache",
    "LaplaceContext",
    "OuterRule",
    "active_count_pmf",
    "assoc_prob",
    "assoc_prob_policy1",
    "assoc_prob_policy2",
    "coverage",
    "coverage_policy1",
    "coverage_policy2",
    "exclusion_radius",
    "interferer_distance_pdf",
    "laplace_inter",
    "laplace_intra",
    "laplace_macro",
    "nearest_sbs_cdf",
    "nearest_sbs_pdf",
    "nearest_sbs_sf",
    "optimal_threshold",
    "sample_truncated_poisson",
    "serving_distance_pdf",
    "throughput",
]
