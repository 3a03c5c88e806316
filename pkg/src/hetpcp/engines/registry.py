"""EngineRegistry — 커버리지 엔진 등록/조회.

스터디의 sweep.engines 값(analytic, simulation)으로 엔진 인스턴스를 찾는다.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import structlog

from hetpcp.engines.base import AnalyticEngine, SimulationEngine

if TYPE_CHECKING:
    from hetpcp.engines.base import CoverageEngine

logger = structlog.get_logger()


class EngineRegistry:
    """엔진 레지스트리 — 이름 → 엔진 인스턴스."""

    def __init__(self) -> None:
        self._registry: dict[str, CoverageEngine] = {}

    def register(self, name: str, engine: CoverageEngine) -> None:
        if name in self._registry:
            logger.warning("engine_override", name=name, new=engine.name)
        self._registry[name] = engine
        logger.debug("engine_registered", name=name, cls=engine.name)

    def get(self, name: str) -> CoverageEngine:
        if name not in self._registry:
            available = list(self._registry.keys())
            raise KeyError(f"엔진 '{name}' 미등록. 사용 가능: {available}")
        return self._registry[name]

    def has(self, name: str) -> bool:
        return name in self._registry

    def list_all(self) -> dict[str, str]:
        """등록된 엔진 목록 — {name: class_name}."""
        return {name: engine.name for name, engine in self._registry.items()}

    def __len__(self) -> int:
        return len(self._registry)


def default_registry() -> EngineRegistry:
    """analytic / simulation 두 엔진이 등록된 레지스트리."""
    registry = EngineRegistry()
    registry.register("analytic", AnalyticEngine())
    registry.register("simulation", SimulationEngine())
    return registry
