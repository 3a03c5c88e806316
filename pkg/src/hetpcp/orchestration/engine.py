"""스윕 엔진 — 스터디 한 개를 (series × sweep 값) 점으로 펼쳐 엔진들로 평가한다.

사용 흐름:
  1. StudyManifest 로드 (scanner.load_study)
  2. SweepEngine.run(manifest) → SweepResult (RunManifest + CSV 행)
  3. 각 점은 asyncio.to_thread 로 실행되고 gather 로 순서대로 모인다

점 시드는 SeedSequence(master_seed, spawn_key=(점 인덱스,)) 에서 파생하므로
병렬도와 무관하게 같은 결과가 나온다.
"""

from __future__ import annotations

import asyncio
import time
from dataclasses import dataclass, field
from datetime import UTC, datetime

import numpy as np
import structlog

from hetpcp import __version__
from hetpcp.engines.base import EvaluationRequest
from hetpcp.engines.registry import EngineRegistry, default_registry
from hetpcp.geometry.kernel import ClusterKernel
from hetpcp.io.results import manifest_rows
from hetpcp.logging.formatter import run_log
from hetpcp.models.params import NetworkParams
from hetpcp.models.study import (
    EngineResult,
    PointResult,
    RunManifest,
    StudyManifest,
    apply_sweep_value,
)
from hetpcp.scanner import study_to_dict

logger = structlog.get_logger()


def _with_seed(study: StudyManifest, seed: int) -> StudyManifest:
    simulation = study.spec.simulation.model_copy(update={"seed": seed})
    spec = study.spec.model_copy(update={"simulation": simulation})
    return study.model_copy(update={"spec": spec})


def point_seed(master_seed: int, index: int) -> int:
    """점 인덱스별 64비트 시드."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(index,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


@dataclass
class SweepPoint:
    index: int
    sweep_value: float
    series_value: float | None
    params: NetworkParams
    seed: int


@dataclass
class SweepResult:
    """스윕 실행 결과."""

    manifest: RunManifest
    rows: list[dict[str, object]] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.manifest.success


class SweepEngine:
    """스터디 실행 엔진 — 레지스트리의 엔진으로 점마다 커버리지를 평가."""

    def __init__(self, registry: EngineRegistry | None = None, *, workers: int = 1) -> None:
        self._registry = registry or default_registry()
        self._workers = max(1, workers)

    def expand(self, study: StudyManifest, master_seed: int) -> list[SweepPoint]:
        """series 바깥, sweep 값 안쪽 순서로 점을 펼친다."""
        spec = study.spec
        sweep = spec.sweep
        base = spec.network.to_params()
        series_values: list[float | None] = (
            list(sweep.series.values) if sweep.series is not None else [None]
        )
        points: list[SweepPoint] = []
        for series_value in series_values:
            series_base = base
            if series_value is not None and sweep.series is not None:
                series_base = apply_sweep_value(
                    base, sweep.series.variable, series_value, couple_sigma_u=sweep.couple_sigma_u
                )
            for value in sweep.resolved_values(series_base):
                params = apply_sweep_value(
                    series_base, sweep.variable, value, couple_sigma_u=sweep.couple_sigma_u
                )
                index = len(points)
                seed = point_seed(master_seed, index)
                points.append(SweepPoint(index, value, series_value, params, seed))
        return points

    def _evaluate_point(self, study: StudyManifest, point: SweepPoint, run_id: str) -> PointResult:
        spec = study.spec
        kernel = ClusterKernel.gaussian(point.params.sigma_s)
        user_kernel = ClusterKernel.gaussian(point.params.sigma_u)
        sim = spec.simulation.model_copy(update={"seed": point.seed})
        result = PointResult(
            index=point.index,
            sweep_value=point.sweep_value,
            series_value=point.series_value,
            point_seed=point.seed,
        )
        for engine_kind in spec.sweep.engines:
            engine = self._registry.get(engine_kind.value)
            for policy in spec.sweep.policy.policies():
                request = EvaluationRequest(
                    params=point.params,
                    kernel=kernel,
                    user_kernel=user_kernel,
                    policy=policy,
                    sim=sim,
                    options=spec.analysis,
                )
                started = time.monotonic()
                try:
                    report = engine.evaluate(request)
                    outcome = EngineResult(engine=engine_kind, policy=policy, report=report)
                except Exception as e:
                    logger.error(
                        "point_failed",
                        point=point.index,
                        engine=engine_kind.value,
                        policy=policy.value,
                        error=str(e),
                    )
                    outcome = EngineResult(
                        engine=engine_kind,
                        policy=policy,
                        status="error",
                        error=f"{type(e).__name__}: {e}",
                    )
                outcome.duration_ms = int((time.monotonic() - started) * 1000)
                result.results.append(outcome)
                mark = "✓" if outcome.status == "ok" else "✗"
                summary = (
                    f"Pc={outcome.report.total_coverage:.4f}" if outcome.report else outcome.error
                )
                run_log(
                    "Sweep",
                    run_id,
                    point.index,
                    f"{mark} {engine_kind.value}/{policy.value} "
                    f"{spec.sweep.variable.value}={point.sweep_value:g} {summary} "
                    f"({outcome.duration_ms}ms)",
                )
        return result

    async def run(self, study: StudyManifest, *, seed: int | None = None) -> SweepResult:
        """스터디 실행. seed 가 주어지면 simulation.seed 를 덮어쓴다."""
        master_seed = study.spec.simulation.seed if seed is None else seed
        if seed is not None:
            study = _with_seed(study, seed)
        run_id = study.metadata.name
        points = self.expand(study, master_seed)
        run_log("Sweep", run_id, "run", f"▶ STARTING sweep: {len(points)} points")

        started_at = datetime.now(UTC).isoformat(timespec="seconds")
        start = time.monotonic()
        semaphore = asyncio.Semaphore(self._workers)

        async def bounded(point: SweepPoint) -> PointResult:
            async with semaphore:
                return await asyncio.to_thread(self._evaluate_point, study, point, run_id)

        results = await asyncio.gather(*(bounded(p) for p in points))

        manifest = RunManifest(
            study=study_to_dict(study),
            library_version=__version__,
            seed=master_seed,
            started_at=started_at,
            wall_clock_seconds=round(time.monotonic() - start, 3),
            points=list(results),
        )
        status = "✓ COMPLETED" if manifest.success else "✗ COMPLETED WITH ERRORS"
        run_log("Sweep", run_id, "run", f"{status} ({manifest.wall_clock_seconds:.1f}s)")
        return SweepResult(manifest=manifest, rows=manifest_rows(manifest))


def run_sweep(
    study: StudyManifest,
    *,
    registry: EngineRegistry | None = None,
    seed: int | None = None,
    workers: int = 1,
) -> SweepResult:
    """동기 진입점."""
    return asyncio.run(SweepEngine(registry, workers=workers).run(study, seed=seed))
