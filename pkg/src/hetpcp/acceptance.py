"""수용 검증 스위트 — `hetpcp validate` 가 돌리는 교차검증 묶음.

  dual_engine_agreement   해석 vs 시뮬레이션 (±0.01)
  classical_reduction     SBS 없는 극한 → 단일 tier PPP 커버리지 1/(1+π/4)
  monotone_tradeoff       n̄ 증가 시 커버리지 비증가, 처리율 비감소
  policy_dominance        P1 ≥ P2 − 0.005
  optimal_threshold       내부 최적 D*, n̄ 증가 시 D* 비증가
  determinism             같은 시드 → 같은 CSV (worker 수 무관)
"""

from __future__ import annotations

import math
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import structlog
from pydantic import BaseModel, ConfigDict, Field

from hetpcp.analysis.coverage import CoverageOptions, optimal_threshold
from hetpcp.engines.base import EvaluationRequest
from hetpcp.engines.registry import EngineRegistry, default_registry
from hetpcp.geometry.kernel import ClusterKernel
from hetpcp.io.results import FLOAT_FORMAT, rows_frame
from hetpcp.logging.formatter import run_log
from hetpcp.models.params import AssociationPolicy, NetworkParams
from hetpcp.models.report import CoverageReport
from hetpcp.models.study import (
    EngineKind,
    NetworkSection,
    PolicySelection,
    StudyManifest,
    StudyMetadata,
    StudySpec,
    SweepSpec,
    SweepVariable,
)
from hetpcp.orchestration.engine import run_sweep
from hetpcp.simulation.engine import simulate_coverage
from hetpcp.simulation.sampler import SimConfig

logger = structlog.get_logger()

AGREEMENT_TOLERANCE = 0.01
DOMINANCE_SLACK = 0.005
SINGLE_TIER_REFERENCE = 1.0 / (1.0 + math.pi / 4.0)


class AcceptanceProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    trials: int = Field(default=100_000, ge=1)
    seed: int = 7
    sigmas: tuple[float, ...] = (0.02, 0.04)
    nbars: tuple[float, ...] = (1.0, 3.0, 5.0, 7.0)
    threshold_nbars: tuple[float, ...] = (1.0, 4.0, 7.0)
    distance_threshold_km: float = 0.08
    d_grid: tuple[float, ...] = (0.01, 0.02, 0.04, 0.06, 0.08, 0.11, 0.15, 0.2, 0.3)
    window_radius_km: float = 3.0

    @classmethod
    def quick(cls) -> AcceptanceProfile:
        return cls(
            trials=20_000,
            sigmas=(0.04,),
            nbars=(1.0, 4.0, 7.0),
            threshold_nbars=(1.0, 7.0),
            d_grid=(0.01, 0.03, 0.06, 0.1, 0.2, 0.4),
            window_radius_km=2.0,
        )


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    measurements: list[dict[str, Any]] = field(default_factory=list)
    duration_ms: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "measurements": self.measurements,
            "duration_ms": self.duration_ms,
        }


class AcceptanceSuite:
    """수용 검증 실행기. 각 검사는 독립적으로 실패할 수 있다."""

    def __init__(
        self, profile: AcceptanceProfile | None = None, registry: EngineRegistry | None = None
    ) -> None:
        self.profile = profile or AcceptanceProfile()
        self._registry = registry or default_registry()
        self._options = CoverageOptions()
        self._grid: dict[tuple[float, float, str, str], CoverageReport] = {}

    # ─── 공통 ───

    def _sim(self, seed_offset: int = 0) -> SimConfig:
        return SimConfig(
            trials=self.profile.trials,
            seed=self.profile.seed + seed_offset,
            window_radius=self.profile.window_radius_km,
        )

    def _params(self, sigma: float, nbar: float) -> NetworkParams:
        params = NetworkParams.baseline(sigma_s=sigma, sigma_u=sigma, nbar_as=nbar)
        return params.with_distance_threshold(self.profile.distance_threshold_km)

    def _report(
        self, sigma: float, nbar: float, policy: AssociationPolicy, engine: EngineKind
    ) -> CoverageReport:
        key = (sigma, nbar, policy.value, engine.value)
        if key not in self._grid:
            seed_offset = len(self._grid)
            request = EvaluationRequest.gaussian(
                self._params(sigma, nbar), policy, sim=self._sim(seed_offset), options=self._options
            )
            self._grid[key] = self._registry.get(engine.value).evaluate(request)
        return self._grid[key]

    def _tolerance(self, report: CoverageReport) -> float:
        half = report.provenance.half_width_95 or 0.0
        return max(AGREEMENT_TOLERANCE, 2.0 * half)

    # ─── 검사 ───

    def check_dual_engine_agreement(self) -> CheckResult:
        rows = []
        passed = True
        for sigma in self.profile.sigmas:
            for nbar in self.profile.nbars:
                for policy in AssociationPolicy:
                    a = self._report(sigma, nbar, policy, EngineKind.ANALYTIC)
                    s = self._report(sigma, nbar, policy, EngineKind.SIMULATION)
                    gap = abs(a.total_coverage - s.total_coverage)
                    ok = gap <= self._tolerance(s)
                    passed &= ok
                    rows.append({
                        "sigma_s": sigma, "nbar_as": nbar, "policy": policy.value,
                        "analytic": a.total_coverage, "simulation": s.total_coverage,
                        "gap": gap, "ok": ok,
                    })
        worst = max(r["gap"] for r in rows)
        return CheckResult("dual_engine_agreement", passed, f"max gap {worst:.4f}", rows)

    def check_classical_reduction(self) -> CheckResult:
        base = NetworkParams.baseline(nbar_as=0.0)
        params = base.replace(p_s=base.p_m * 1e-16)
        request = EvaluationRequest.gaussian(
            params, AssociationPolicy.P1, sim=self._sim(10_000), options=self._options
        )
        rows = []
        passed = True
        for engine in (EngineKind.ANALYTIC, EngineKind.SIMULATION):
            report = self._registry.get(engine.value).evaluate(request)
            gap = abs(report.total_coverage - SINGLE_TIER_REFERENCE)
            ok = gap <= self._tolerance(report)
            passed &= ok
            rows.append({"engine": engine.value, "coverage": report.total_coverage, "gap": gap})
        return CheckResult(
            "classical_reduction", passed, f"reference {SINGLE_TIER_REFERENCE:.4f}", rows
        )

    def check_monotone_tradeoff(self) -> CheckResult:
        rows = []
        passed = True
        nbars = self.profile.nbars
        for sigma in self.profile.sigmas:
            for policy in AssociationPolicy:
                a = [self._report(sigma, n, policy, EngineKind.ANALYTIC) for n in nbars]
                s = [self._report(sigma, n, policy, EngineKind.SIMULATION) for n in nbars]
                for i in range(len(nbars) - 1):
                    slack = (s[i].provenance.half_width_95 or 0.0) + (
                        s[i + 1].provenance.half_width_95 or 0.0
                    )
                    ok = (
                        a[i + 1].total_coverage <= a[i].total_coverage + 1e-9
                        and a[i + 1].throughput >= a[i].throughput - 1e-9
                        and s[i + 1].total_coverage <= s[i].total_coverage + slack
                    )
                    passed &= ok
                    rows.append({
                        "sigma_s": sigma, "policy": policy.value,
                        "nbar_from": nbars[i], "nbar_to": nbars[i + 1], "ok": ok,
                    })
        return CheckResult("monotone_tradeoff", passed, f"{len(rows)} steps", rows)

    def check_policy_dominance(self) -> CheckResult:
        rows = []
        passed = True
        for sigma in self.profile.sigmas:
            for nbar in self.profile.nbars:
                p1 = self._report(sigma, nbar, AssociationPolicy.P1, EngineKind.ANALYTIC)
                p2 = self._report(sigma, nbar, AssociationPolicy.P2, EngineKind.ANALYTIC)
                ok = p1.total_coverage >= p2.total_coverage - DOMINANCE_SLACK
                passed &= ok
                rows.append({
                    "sigma_s": sigma, "nbar_as": nbar,
                    "p1": p1.total_coverage, "p2": p2.total_coverage, "ok": ok,
                })
        return CheckResult("policy_dominance", passed, f"slack {DOMINANCE_SLACK}", rows)

    def check_optimal_threshold(self) -> CheckResult:
        sigma = self.profile.sigmas[-1]
        grid = list(self.profile.d_grid)
        rows = []
        passed = True
        optima = []
        for i, nbar in enumerate(self.profile.threshold_nbars):
            params = self._params(sigma, nbar)
            kernel = ClusterKernel.gaussian(sigma)
            d_star, c_star = optimal_threshold(params, kernel, grid, options=self._options)
            ends = [
                EvaluationRequest.gaussian(
                    params.with_distance_threshold(d), AssociationPolicy.P2, options=self._options
                )
                for d in (grid[0], grid[-1])
            ]
            end_values = [self._registry.get("analytic").evaluate(r).total_coverage for r in ends]
            sim = simulate_coverage(
                params.with_distance_threshold(d_star),
                kernel,
                AssociationPolicy.P2,
                self._sim(20_000 + i),
            )
            margin = c_star - max(end_values)
            half = sim.provenance.half_width_95 or 0.0
            ok = grid[0] < d_star < grid[-1] and margin > 2.0 * half
            passed &= ok
            optima.append(d_star)
            rows.append({
                "nbar_as": nbar, "d_star": d_star, "coverage": c_star,
                "margin": margin, "sim_half_width": half, "ok": ok,
            })
        shrinking = all(b <= a + 1e-9 for a, b in zip(optima, optima[1:]))
        passed &= shrinking
        return CheckResult(
            "optimal_threshold", passed, f"D* = {[round(d, 4) for d in optima]}", rows
        )

    def check_determinism(self) -> CheckResult:
        study = StudyManifest(
            metadata=StudyMetadata(name="determinism"),
            spec=StudySpec(
                network=NetworkSection(distance_threshold_km=self.profile.distance_threshold_km),
                sweep=SweepSpec(
                    variable=SweepVariable.NBAR_AS,
                    values=[1.0, 4.0],
                    engines=[EngineKind.SIMULATION],
                    policy=PolicySelection.BOTH,
                ),
                simulation=SimConfig(trials=2_000, seed=self.profile.seed, batch_size=500),
            ),
        )
        csv = []
        for workers in (1, 2):
            result = run_sweep(study, registry=self._registry, workers=workers)
            frame = rows_frame(result.rows)
            csv.append(frame.to_csv(index=False, float_format=FLOAT_FORMAT, na_rep=""))
        same = csv[0] == csv[1]
        return CheckResult("determinism", same, "identical CSV" if same else "CSV differs")

    # ─── 실행 ───

    def checks(self) -> list[Callable[[], CheckResult]]:
        return [
            self.check_dual_engine_agreement,
            self.check_classical_reduction,
            self.check_monotone_tradeoff,
            self.check_policy_dominance,
            self.check_optimal_threshold,
            self.check_determinism,
        ]

    def run(self) -> list[CheckResult]:
        results = []
        for check in self.checks():
            name = check.__name__.removeprefix("check_")
            started = time.monotonic()
            try:
                result = check()
            except Exception as e:
                logger.error("acceptance_check_crashed", check=name, error=str(e))
                result = CheckResult(name, False, f"{type(e).__name__}: {e}")
            result.duration_ms = int((time.monotonic() - started) * 1000)
            mark = "✓" if result.passed else "✗"
            run_log("Validate", "acceptance", name, f"{mark} {result.detail}")
            results.append(result)
        return results
