"""클러스터 기하 — 커널과 조건부 거리 법칙."""

from hetpcp.geometry.kernel import (
    ClusterKernel,
    ConditionalDistanceLaw,
    KernelKind,
    conditional_distance_law,
    distance_cdf,
    distance_cdf_general,
    distance_pdf,
    distance_pdf_array,
    distance_sf,
    intercluster_distance_pdf,
    rician_pdf,
    user_center_distance_cdf,
    user_center_distance_pdf,
)

__all__ = [
    "ClusterKernel",
    "ConditionalDistanceLaw",
    "KernelKind",
    "conditional_distance_law",
    "distance_cdf",
    "distance_cdf_general",
    "distance_pdf",
    "distance_pdf_array",
    "distance_sf",
    "intercluster_distance_pdf",
    "rician_pdf",
    "user_center_distance_cdf",
    "user_center_distance_pdf",
]
