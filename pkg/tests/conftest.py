"""공통 테스트 픽스처 — 기준 파라미터, 커널, 임시 스터디 디렉토리."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from hetpcp.geometry.kernel import ClusterKernel
from hetpcp.models.params import NetworkParams
from tests.helpers import SAMPLE_SERIES_YAML, SAMPLE_STUDY_YAML, write_yaml


@pytest.fixture
def params() -> NetworkParams:
    """기준 시나리오 + D = 80 m (P2 사용 가능)."""
    return NetworkParams.baseline().with_distance_threshold(0.08)


@pytest.fixture
def kernel() -> ClusterKernel:
    return ClusterKernel.gaussian(0.04)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def resources_dir(tmp_path: Path) -> Path:
    """샘플 스터디 두 개가 있는 resources 디렉토리."""
    write_yaml(tmp_path / "studies" / "test-study.yaml", SAMPLE_STUDY_YAML)
    write_yaml(tmp_path / "studies" / "series-study.yaml", SAMPLE_SERIES_YAML)
    return tmp_path
