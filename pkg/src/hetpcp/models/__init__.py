"""도메인 모델 — 네트워크 파라미터와 커버리지 리포트.

스터디/매니페스트 스키마는 hetpcp.models.study 에서 직접 가져온다.
"""

from hetpcp.models.params import (
    AssociationPolicy,
    LaplaceMode,
    NetworkParams,
    Tier,
    db_to_linear,
    dbm_to_mw,
    linear_to_db,
    mw_to_dbm,
)
from hetpcp.models.report import CoverageReport, Provenance, ProvenanceKind, TierValues

__all__ = [
    "AssociationPolicy",
    "CoverageReport",
    "LaplaceMode",
    "NetworkParams",
    "Provenance",
    "ProvenanceKind",
    "Tier",
    "TierValues",
    "db_to_linear",
    "dbm_to_mw",
    "linear_to_db",
    "mw_to_dbm",
]
