"""hetpcp 예외 계층.

수치 계층은 조용히 틀린 값을 돌려주지 않는다. 정확도 미달, 정의역 위반,
비유한 피적분값은 모두 아래 예외로 드러나며, CLI 경계에서 한 번에 처리된다.

  HetpcpError
  ├── NumericsDomainError (ValueError)   — 전제조건 위반 (음수 인자, α ≤ 2 …)
  ├── AccuracyNotReachedError            — 적분 허용오차 미달 (추정값/오차 동봉)
  ├── IntegrandEvaluationError           — 피적분 함수가 NaN 을 반환
  ├── DegenerateConditioningError        — 조건부 밀도의 분모가 사실상 0
  ├── AssociationInvariantError          — 시뮬레이션 배제영역 위반
  ├── ConfigError                        — YAML 스터디 파싱/검증 실패
  └── PlotSpecError                      — 플롯 스크립트 생성 불가
"""

from __future__ import annotations

from dataclasses import dataclass


class HetpcpError(Exception):
    """hetpcp 최상위 예외."""


class NumericsDomainError(HetpcpError, ValueError):
    """수치 연산의 전제조건 위반."""


class AccuracyNotReachedError(HetpcpError):
    """적응형 구적이 요구 허용오차에 도달하지 못함."""

    def __init__(self, message: str, *, estimate: float, abserr: float) -> None:
        super().__init__(f"{message} (estimate={estimate:.6g}, abserr={abserr:.3g})")
        self.estimate = estimate
        self.abserr = abserr


class IntegrandEvaluationError(HetpcpError):
    """피적분 함수가 유한하지 않은 값을 돌려줌."""

    def __init__(self, point: float, value: float) -> None:
        super().__init__(f"피적분 함수가 t={point!r}에서 {value!r}을 반환했습니다")
        self.point = point
        self.value = value


class DegenerateConditioningError(HetpcpError):
    """조건부 밀도의 정규화 분모가 임계값(1e-12) 미만."""


class AssociationInvariantError(HetpcpError):
    """시뮬레이션에서 간섭원이 배제 반경 안에 존재함."""


@dataclass
class ConfigIssue:
    """설정 파일 오류 한 건 — 파일/종류/필드/줄 번호."""

    file_path: str
    error_type: str
    message: str
    field: str | None = None
    line: int | None = None

    def describe(self) -> str:
        where = self.file_path if self.line is None else f"{self.file_path}:{self.line}"
        target = f" [{self.field}]" if self.field else ""
        return f"{where}{target} {self.error_type}: {self.message}"


class ConfigError(HetpcpError):
    """스터디 설정 파싱/검증 실패 — 발견된 모든 이슈를 담는다."""

    def __init__(self, issues: list[ConfigIssue]) -> None:
        self.issues = issues
        super().__init__("\n".join(issue.describe() for issue in issues))


class PlotSpecError(HetpcpError):
    """매니페스트로부터 플롯 스크립트를 만들 수 없음."""
