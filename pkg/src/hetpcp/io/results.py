"""결과 파일 — 스윕 CSV 와 JSON 실행 매니페스트.

CSV 는 한 행이 (점 × 엔진 × 정책 × tier∪total) 이고 행 순서는 결정적이다.
부동소수는 %.9g 로 기록한다.
"""

from __future__ import annotations

import math
from pathlib import Path

import pandas as pd
import structlog

from hetpcp.models.params import Tier
from hetpcp.models.report import ProvenanceKind
from hetpcp.models.study import RunManifest

logger = structlog.get_logger()

CSV_COLUMNS = [
    "sweep_var",
    "value",
    "series_var",
    "series_value",
    "engine",
    "policy",
    "tier",
    "coverage",
    "ci_half_width",
    "assoc_prob",
    "throughput",
    "status",
]
TIER_ORDER = (Tier.MACRO.value, Tier.SMALL.value, "total")
FLOAT_FORMAT = "%.9g"
_METRIC_COLUMNS = ("coverage", "ci_half_width", "assoc_prob", "throughput")


def manifest_rows(run: RunManifest) -> list[dict[str, object]]:
    """매니페스트 → CSV 행 (점 순서 × 엔진 × 정책 × tier)."""
    sweep = run.study_manifest().spec.sweep
    series_var = sweep.series.variable.value if sweep.series else ""
    rows: list[dict[str, object]] = []
    for point in run.points:
        for result in point.results:
            base = {
                "sweep_var": sweep.variable.value,
                "value": point.sweep_value,
                "series_var": series_var,
                "series_value": math.nan if point.series_value is None else point.series_value,
                "engine": result.engine.value,
                "policy": result.policy.value,
            }
            report = result.report
            for tier in TIER_ORDER:
                row = {**base, "tier": tier, "status": result.status}
                if report is None:
                    row.update(dict.fromkeys(_METRIC_COLUMNS, math.nan))
                    rows.append(row)
                    continue
                simulated = report.provenance.kind is ProvenanceKind.SIMULATED
                if tier == "total":
                    row.update(
                        coverage=report.total_coverage,
                        ci_half_width=report.provenance.half_width_95 if simulated else math.nan,
                        assoc_prob=report.assoc_prob_avg.total,
                        throughput=report.throughput,
                    )
                else:
                    t = Tier(tier)
                    half = report.provenance.tier_half_width_95
                    row.update(
                        coverage=report.per_tier_coverage[t],
                        ci_half_width=half[t] if simulated and half is not None else math.nan,
                        assoc_prob=report.assoc_prob_avg[t],
                        throughput=math.nan,
                    )
                rows.append(row)
    return rows


def rows_frame(rows: list[dict[str, object]]) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def write_csv(rows: list[dict[str, object]], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows_frame(rows).to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="")
    logger.debug("csv_written", path=str(path), rows=len(rows))
    return path


def read_csv(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(path, keep_default_na=True)


def write_manifest(run: RunManifest, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(run.model_dump_json(indent=2), encoding="utf-8")
    return path


def read_manifest(path: str | Path) -> RunManifest:
    return RunManifest.model_validate_json(Path(path).read_text(encoding="utf-8"))
