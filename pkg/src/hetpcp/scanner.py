"""StudyScanner — resources/studies/ YAML 스캔과 설정 로드/덤프.

스터디 파일을 파싱하고 Pydantic 모델로 검증한다. 오류는 파일/필드/줄 번호를 담은
ConfigIssue 로 모아 한 번에 보고한다.

  scanner.scan_all()  → 번들 스터디 목록 + 오류 (CLI `studies`)
  load_study(path)    → StudyManifest (오류 시 ConfigError)
  load_config(path)   → (NetworkParams, SweepSpec, SimConfig)
  dump_config(...)    → YAML 문자열 (load_config 로 되읽으면 같은 값)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import structlog
import yaml
from pydantic import ValidationError

from hetpcp.analysis.coverage import CoverageOptions
from hetpcp.errors import ConfigError, ConfigIssue
from hetpcp.models.params import NetworkParams
from hetpcp.models.study import (
    NetworkSection,
    ResourceKind,
    StudyManifest,
    StudyMetadata,
    StudySpec,
    SweepSpec,
)
from hetpcp.simulation.sampler import SimConfig

logger = structlog.get_logger()


@dataclass
class ScanResult:
    """스캔 결과 — 검증된 스터디 목록 + 오류."""

    studies: list[StudyManifest] = field(default_factory=list)
    errors: list[ConfigIssue] = field(default_factory=list)


def _line_of(text: str, loc: tuple[Any, ...]) -> int | None:
    """검증 오류 위치(loc)를 YAML 노드 줄 번호(1부터)로 변환."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError:
        return None
    line = None
    for key in loc:
        if isinstance(node, yaml.MappingNode):
            match = next((v for k, v in node.value if k.value == str(key)), None)
            if match is None:
                break
            key_node = next(k for k, v in node.value if v is match)
            line = key_node.start_mark.line + 1
            node = match
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
            line = node.start_mark.line + 1
        else:
            break
    return line


def parse_study(text: str, file_path: str) -> tuple[StudyManifest | None, list[ConfigIssue]]:
    """YAML 텍스트 → (StudyManifest | None, 오류 목록)."""
    issues: list[ConfigIssue] = []
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        issues.append(ConfigIssue(
            file_path=file_path,
            error_type="YAMLSyntax",
            message=str(getattr(e, "problem", None) or e),
            line=mark.line + 1 if mark is not None else None,
        ))
        return None, issues

    if raw is None:
        issues.append(ConfigIssue(file_path, "EmptyFile", "YAML 파일이 비어있습니다"))
        return None, issues
    if not isinstance(raw, dict):
        issues.append(ConfigIssue(file_path, "InvalidRoot", "최상위는 매핑이어야 합니다", line=1))
        return None, issues

    kind = raw.get("kind")
    if kind is not None and kind != ResourceKind.STUDY.value:
        issues.append(ConfigIssue(
            file_path=file_path,
            error_type="KindMismatch",
            message=f"kind '{kind}'이 예상과 다릅니다 (기대: '{ResourceKind.STUDY.value}')",
            field="kind",
            line=_line_of(text, ("kind",)),
        ))
        return None, issues

    try:
        manifest = StudyManifest.model_validate(raw)
    except ValidationError as e:
        for err in e.errors():
            loc = tuple(err["loc"])
            issues.append(ConfigIssue(
                file_path=file_path,
                error_type="ValidationError",
                message=err["msg"],
                field=" → ".join(str(part) for part in loc) or None,
                line=_line_of(text, loc),
            ))
        return None, issues

    manifest.source_path = file_path
    logger.debug("study_parsed", file=file_path, name=manifest.metadata.name)
    return manifest, issues


class StudyScanner:
    """resources/studies/ 자동 스캔."""

    def __init__(self, base_dir: str | Path) -> None:
        self._base_dir = Path(base_dir)

    @property
    def studies_dir(self) -> Path:
        return self._base_dir / "studies"

    def scan_all(self) -> ScanResult:
        result = ScanResult()
        if not self.studies_dir.exists():
            return result
        for yaml_file in sorted(self.studies_dir.glob("*.yaml")):
            manifest, issues = parse_study(yaml_file.read_text(encoding="utf-8"), str(yaml_file))
            result.errors.extend(issues)
            if manifest is not None:
                result.studies.append(manifest)
        return result

    def find(self, name: str) -> StudyManifest:
        """이름(metadata.name 또는 파일 stem)으로 번들 스터디 조회."""
        result = self.scan_all()
        for study in result.studies:
            if study.metadata.name == name or Path(study.source_path or "").stem == name:
                return study
        available = [s.metadata.name for s in result.studies]
        raise KeyError(f"스터디 '{name}' 없음. 사용 가능: {available}")


# ─── 로드/덤프 ───────────────────────────────────────


def load_study(path: str | Path) -> StudyManifest:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError([ConfigIssue(str(path), type(e).__name__, str(e))]) from e
    manifest, issues = parse_study(text, str(path))
    if manifest is None:
        raise ConfigError(issues)
    return manifest


def load_config(path: str | Path) -> tuple[NetworkParams, SweepSpec, SimConfig]:
    """스터디 파일 → (네트워크 파라미터, 스윕, 시뮬레이션 설정)."""
    manifest = load_study(path)
    spec = manifest.spec
    return spec.network.to_params(), spec.sweep, spec.simulation


def study_to_dict(manifest: StudyManifest) -> dict[str, Any]:
    return manifest.model_dump(mode="json", by_alias=True, exclude_none=True)


def dump_study(manifest: StudyManifest) -> str:
    return yaml.safe_dump(study_to_dict(manifest), sort_keys=False, allow_unicode=True)


def dump_config(
    params: NetworkParams,
    sweep: SweepSpec,
    sim: SimConfig,
    *,
    name: str = "study",
    analysis: CoverageOptions | None = None,
) -> str:
    """(params, sweep, sim) → 스터디 YAML. 전력은 mW, β 는 선형값으로 기록."""
    manifest = StudyManifest(
        metadata=StudyMetadata(name=name),
        spec=StudySpec(
            network=NetworkSection.from_params(params),
            sweep=sweep,
            simulation=sim,
            analysis=analysis or CoverageOptions(),
        ),
    )
    return dump_study(manifest)
