"""통일 로그 포맷 테스트."""

from __future__ import annotations

import re

import pytest

from hetpcp.logging.formatter import HetLogFormatter, run_log

LINE = re.compile(r"^\[\d{2}:\d{2}:\d{2}:\d{3}\] \[(\w+)\] \[([\w-]+):(\w+)\] (.*)$")


class TestHetLogFormatter:
    def test_포맷(self) -> None:
        match = LINE.match(HetLogFormatter.format("Sweep", "fig2", "3", "✓ analytic/p1"))

        assert match is not None
        assert match.groups() == ("Sweep", "fig2", "3", "✓ analytic/p1")

    def test_부트_로그(self) -> None:
        match = LINE.match(HetLogFormatter.format_boot("hetpcp v0.1.0"))

        assert match is not None
        assert match.group(1) == "hetpcp"
        assert match.group(2) == "system"
        assert match.group(3) == "boot"

    def test_run_log_출력(self, capsys: pytest.CaptureFixture[str]) -> None:
        """대괄호 메시지가 rich markup 으로 해석되지 않는다."""
        run_log("Validate", "acceptance", "determinism", "[red]x[/red]")
        out = capsys.readouterr().out

        assert "[red]x[/red]" in out
        assert "[Validate] [acceptance:determinism]" in out
