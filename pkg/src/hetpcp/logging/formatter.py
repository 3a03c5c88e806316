"""hetpcp 통일 로그 포맷터.

포맷: [HH:mm:ss:SSS] [component] [runId:point] msg
스윕 진행, 엔진 평가, 부트 로그가 이 형식을 따른다.
구조화 이벤트(디버그/경고)는 structlog 로 별도 출력한다.
"""

from __future__ import annotations

from datetime import datetime

from rich.console import Console

_console = Console(highlight=False, soft_wrap=True)


class HetLogFormatter:
    """통일 로그 포맷 생성기."""

    @staticmethod
    def format(component: str, run_id: str, point: str, msg: str) -> str:
        """[HH:mm:ss:SSS] [component] [run:point] msg 형식으로 포맷."""
        now = datetime.now()
        ts = now.strftime("%H:%M:%S") + f":{now.microsecond // 1000:03d}"
        return f"[{ts}] [{component}] [{run_id}:{point}] {msg}"

    @staticmethod
    def format_boot(msg: str) -> str:
        """부트 로그 — [..] [hetpcp] [system:boot] msg."""
        return HetLogFormatter.format("hetpcp", "system", "boot", msg)


def run_log(component: str, run_id: str, point: str | int, msg: str) -> None:
    """포맷된 진행 로그를 콘솔에 출력."""
    _console.print(HetLogFormatter.format(component, run_id, str(point), msg), markup=False)


def boot_log(msg: str) -> None:
    """부트 로그 출력."""
    _console.print(HetLogFormatter.format_boot(msg), markup=False)
