"""몬테카를로 네트워크 시뮬레이터."""

from hetpcp.simulation.engine import CoverageTally, simulate_coverage, wilson_half_width
from hetpcp.simulation.sampler import (
    NetworkRealization,
    SimConfig,
    sample_batch,
    sample_realization,
)

__all__ = [
    "CoverageTally",
    "NetworkRealization",
    "SimConfig",
    "sample_batch",
    "sample_realization",
    "simulate_coverage",
    "wilson_half_width",
]
