"""결과 파일 테스트 — CSV 스키마/서식/결정성과 매니페스트 JSON."""

from __future__ import annotations

import math
from pathlib import Path

import pandas as pd
import pytest

from hetpcp.io.results import (
    CSV_COLUMNS,
    manifest_rows,
    read_csv,
    read_manifest,
    write_csv,
    write_manifest,
)
from hetpcp.models.params import AssociationPolicy
from hetpcp.models.report import CoverageReport, Provenance, ProvenanceKind, TierValues
from hetpcp.models.study import EngineKind, EngineResult, PointResult, RunManifest
from hetpcp.orchestration.engine import run_sweep
from hetpcp.scanner import parse_study, study_to_dict
from tests.helpers import SAMPLE_STUDY_YAML, mock_registry


def _simulated_manifest() -> RunManifest:
    study, _ = parse_study(SAMPLE_STUDY_YAML, "inline.yaml")
    assert study is not None
    report = CoverageReport(
        policy=AssociationPolicy.P1,
        per_tier_coverage=TierValues(macro=0.2, small=1.0 / 3.0),
        total_coverage=0.2 + 1.0 / 3.0,
        assoc_prob_avg=TierValues(macro=0.4, small=0.6),
        throughput=10.5,
        provenance=Provenance(
            kind=ProvenanceKind.SIMULATED,
            trials=1000,
            seed=5,
            half_width_95=0.031,
            tier_half_width_95=TierValues(macro=0.025, small=0.029),
        ),
    )
    point = PointResult(
        index=0,
        sweep_value=1.0,
        point_seed=5,
        results=[EngineResult(engine=EngineKind.SIMULATION, policy=AssociationPolicy.P1,
                              report=report)],
    )
    return RunManifest(
        study=study_to_dict(study),
        library_version="0.0.0",
        seed=42,
        started_at="2024-06-01T00:00:00+00:00",
        points=[point],
    )


class TestManifestRows:
    """manifest_rows() — 행 전개."""

    def test_tier_순서와_값(self) -> None:
        rows = manifest_rows(_simulated_manifest())

        assert [r["tier"] for r in rows] == ["macro", "small", "total"]
        assert rows[0]["ci_half_width"] == 0.025
        assert rows[2]["ci_half_width"] == 0.031
        assert rows[2]["coverage"] == pytest.approx(0.2 + 1.0 / 3.0)
        assert rows[2]["assoc_prob"] == pytest.approx(1.0)

    def test_처리율은_total_행만(self) -> None:
        rows = manifest_rows(_simulated_manifest())

        assert math.isnan(rows[0]["throughput"])
        assert math.isnan(rows[1]["throughput"])
        assert rows[2]["throughput"] == 10.5

    def test_해석_결과는_구간_없음(self) -> None:
        study, _ = parse_study(SAMPLE_STUDY_YAML, "inline.yaml")
        result = run_sweep(study, registry=mock_registry())

        assert all(math.isnan(r["ci_half_width"]) for r in result.rows)
        assert {r["engine"] for r in result.rows} == {"analytic"}
        assert {r["sweep_var"] for r in result.rows} == {"nbar_as"}


class TestCsv:
    """write_csv() — 열, 서식, 결정성."""

    def test_열_순서(self, tmp_path: Path) -> None:
        path = write_csv(manifest_rows(_simulated_manifest()), tmp_path / "r.csv")
        header = path.read_text(encoding="utf-8").splitlines()[0]

        assert header.split(",") == CSV_COLUMNS

    def test_유효숫자_9자리(self, tmp_path: Path) -> None:
        path = write_csv(manifest_rows(_simulated_manifest()), tmp_path / "r.csv")
        text = path.read_text(encoding="utf-8")

        assert "0.333333333" in text
        assert "0.3333333333" not in text

    def test_NaN_은_빈칸(self, tmp_path: Path) -> None:
        path = write_csv(manifest_rows(_simulated_manifest()), tmp_path / "r.csv")
        macro_line = path.read_text(encoding="utf-8").splitlines()[1]

        assert macro_line.endswith(",,ok")  # throughput 빈칸, status

    def test_바이트_동일(self, tmp_path: Path) -> None:
        study, _ = parse_study(SAMPLE_STUDY_YAML, "inline.yaml")
        a = write_csv(run_sweep(study, registry=mock_registry()).rows, tmp_path / "a.csv")
        b = write_csv(run_sweep(study, registry=mock_registry()).rows, tmp_path / "b.csv")

        assert a.read_bytes() == b.read_bytes()

    def test_되읽기(self, tmp_path: Path) -> None:
        path = write_csv(manifest_rows(_simulated_manifest()), tmp_path / "r.csv")
        frame = read_csv(path)

        assert list(frame.columns) == CSV_COLUMNS
        assert len(frame) == 3
        assert pd.isna(frame.loc[0, "throughput"])
        assert frame.loc[2, "throughput"] == pytest.approx(10.5)


class TestManifestJson:
    def test_왕복(self, tmp_path: Path) -> None:
        manifest = _simulated_manifest()
        path = write_manifest(manifest, tmp_path / "out" / "manifest.json")

        assert read_manifest(path) == manifest

    def test_스터디_복원(self) -> None:
        restored = _simulated_manifest().study_manifest()

        assert restored.metadata.name == "test-study"
        assert restored.spec.sweep.values == [1.0, 2.0, 3.0]
