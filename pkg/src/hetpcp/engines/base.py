"""CoverageEngine ABC — 해석/시뮬레이션 엔진의 공통 인터페이스.

두 엔진은 같은 EvaluationRequest 를 받아 같은 모양의 CoverageReport 를 돌려주므로
스윕 오케스트레이터는 엔진 종류를 몰라도 된다.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field

from hetpcp.analysis.coverage import DEFAULT_OPTIONS, CoverageOptions, coverage
from hetpcp.geometry.kernel import ClusterKernel
from hetpcp.models.params import AssociationPolicy, NetworkParams
from hetpcp.models.report import CoverageReport
from hetpcp.simulation.engine import simulate_coverage
from hetpcp.simulation.sampler import SimConfig


@dataclass(frozen=True)
class EvaluationRequest:
    """한 파라미터 점에서 한 정책을 평가하는 요청."""

    params: NetworkParams
    kernel: ClusterKernel
    user_kernel: ClusterKernel
    policy: AssociationPolicy
    sim: SimConfig = field(default_factory=SimConfig)
    options: CoverageOptions = DEFAULT_OPTIONS

    @classmethod
    def gaussian(
        cls,
        params: NetworkParams,
        policy: AssociationPolicy,
        *,
        sim: SimConfig | None = None,
        options: CoverageOptions | None = None,
    ) -> EvaluationRequest:
        return cls(
            params=params,
            kernel=ClusterKernel.gaussian(params.sigma_s),
            user_kernel=ClusterKernel.gaussian(params.sigma_u),
            policy=policy,
            sim=sim or SimConfig(),
            options=options or DEFAULT_OPTIONS,
        )


class CoverageEngine(ABC):
    """커버리지 엔진 공통 인터페이스."""

    @property
    def name(self) -> str:
        return self.__class__.__name__

    @abstractmethod
    def evaluate(self, request: EvaluationRequest) -> CoverageReport:
        """요청 하나를 평가. 실패는 예외로 알린다."""
        ...


class AnalyticEngine(CoverageEngine):
    """해석 파이프라인 (구적법)."""

    def evaluate(self, request: EvaluationRequest) -> CoverageReport:
        return coverage(
            request.params,
            request.kernel,
            request.policy,
            user_kernel=request.user_kernel,
            options=request.options,
        )


class SimulationEngine(CoverageEngine):
    """몬테카를로 네트워크 시뮬레이터."""

    def evaluate(self, request: EvaluationRequest) -> CoverageReport:
        return simulate_coverage(
            request.params,
            request.kernel,
            request.policy,
            request.sim,
            user_kernel=request.user_kernel,
        )
