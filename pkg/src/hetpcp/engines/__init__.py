"""커버리지 엔진 — 해석/시뮬레이션 공통 인터페이스와 레지스트리."""

from hetpcp.engines.base import (
    AnalyticEngine,
    CoverageEngine,
    EvaluationRequest,
    SimulationEngine,
)
from hetpcp.engines.registry import EngineRegistry, default_registry

__all__ = [
    "AnalyticEngine",
    "CoverageEngine",
    "EngineRegistry",
    "EvaluationRequest",
    "SimulationEngine",
    "default_registry",
]
