"""hetpcp CLI — Click 기반 커맨드라인 인터페이스.

  hetpcp coverage   단일 점 커버리지 (해석/시뮬레이션)
  hetpcp sweep      스터디 스윕 → results.csv + manifest.json
  hetpcp validate   수용 검증 스위트 (--quick)
  hetpcp plot       매니페스트에서 그림 재현 스크립트 생성
  hetpcp studies    번들 스터디 목록

모든 옵션은 HETPCP_<VERB>_<OPTION> 환경변수로도 줄 수 있다 (예: HETPCP_SWEEP_SEED).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any

import click
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from hetpcp import __version__
from hetpcp.errors import ConfigError, ConfigIssue, HetpcpError, PlotSpecError
from hetpcp.logging.formatter import boot_log
from hetpcp.models.params import LaplaceMode
from hetpcp.models.study import EngineKind, PolicySelection, StudyManifest, StudyMetadata

console = Console()
error_console = Console(stderr=True)

RESULTS_CSV = "results.csv"
MANIFEST_JSON = "manifest.json"

_ENGINE_CHOICES = {
    "analytic": [EngineKind.ANALYTIC],
    "sim": [EngineKind.SIMULATION],
    "both": [EngineKind.ANALYTIC, EngineKind.SIMULATION],
}

# ─── 유틸리티 ──────────────────────────────────────────


def _resolve_resources_dir(resources: str | None) -> Path:
    """resources 디렉토리 경로 해석."""
    p = Path(resources) if resources else Path.cwd() / "resources"
    if not p.exists():
        error_console.print(f"[red]✗ resources 디렉토리 없음: {p}[/red]")
        sys.exit(1)
    return p


def _print_issues(issues: list[ConfigIssue]) -> None:
    err_table = Table(title="⚠ 설정 에러", show_header=True, header_style="bold red")
    err_table.add_column("파일", style="dim")
    err_table.add_column("줄", justify="right")
    err_table.add_column("유형", style="yellow")
    err_table.add_column("필드", style="cyan")
    err_table.add_column("메시지", style="red")
    for issue in issues:
        err_table.add_row(
            issue.file_path,
            str(issue.line) if issue.line is not None else "—",
            issue.error_type,
            issue.field or "—",
            issue.message,
        )
    error_console.print(err_table)


def _load_study(config: str | None, study: str | None, resources: str | None) -> StudyManifest:
    """--config 파일 > --study 번들 이름 > 기본 스터디."""
    from hetpcp.scanner import StudyScanner, load_study

    try:
        if config:
            return load_study(config)
        if study:
            return StudyScanner(_resolve_resources_dir(resources)).find(study)
    except ConfigError as e:
        _print_issues(e.issues)
        sys.exit(1)
    except KeyError as e:
        error_console.print(f"[red]✗ {e.args[0]}[/red]")
        sys.exit(1)
    return StudyManifest(metadata=StudyMetadata(name="default"))


def _override(
    study: StudyManifest,
    *,
    engine: str | None = None,
    policy: str | None = None,
    trials: int | None = None,
    mode: str | None = None,
) -> StudyManifest:
    """CLI 플래그를 스터디 사본에 반영."""
    spec = study.spec
    sweep_update: dict[str, Any] = {}
    if engine:
        sweep_update["engines"] = _ENGINE_CHOICES[engine]
    if policy:
        sweep_update["policy"] = PolicySelection(policy)
    updates: dict[str, Any] = {}
    if sweep_update:
        updates["sweep"] = spec.sweep.model_copy(update=sweep_update)
    if trials is not None:
        updates["simulation"] = spec.simulation.model_copy(update={"trials": trials})
    if mode:
        updates["analysis"] = spec.analysis.model_copy(update={"mode": LaplaceMode(mode)})
    if not updates:
        return study
    return study.model_copy(update={"spec": spec.model_copy(update=updates)})


def _fmt(value: float | None, digits: int = 4) -> str:
    return "—" if value is None else f"{value:.{digits}f}"


# ─── 메인 그룹 ─────────────────────────────────────────


@click.group()
@click.version_option(version=__version__, prog_name="hetpcp")
def cli() -> None:
    """📡 hetpcp — 클러스터 HetNet 커버리지/처리율 계산기.

    해석 파이프라인과 몬테카를로 시뮬레이터로 같은 질문에 답하고 서로 검증한다.
    """


_config_option = click.option(
    "--config", "-c",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="스터디 YAML 경로",
)
_study_option = click.option("--study", "-s", default=None, help="번들 스터디 이름 (fig2 …)")
_resources_option = click.option(
    "--resources", "-r",
    type=click.Path(exists=True, file_okay=False),
    default=None,
    help="resources/ 디렉토리 경로 (기본: ./resources)",
)
_engine_option = click.option(
    "--engine", type=click.Choice(list(_ENGINE_CHOICES)), default=None, help="평가 엔진"
)
_policy_option = click.option(
    "--policy", type=click.Choice([p.value for p in PolicySelection]), default=None,
    help="연결 정책",
)
_seed_option = click.option(
    "--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="마스터 시드 (u64)"
)
_trials_option = click.option(
    "--trials", type=click.IntRange(min=1), default=None, help="시뮬레이션 시행 수"
)


# ─── hetpcp coverage ───────────────────────────────────


@cli.command()
@_config_option
@_study_option
@_resources_option
@_engine_option
@_policy_option
@_seed_option
@_trials_option
@click.option(
    "--mode", type=click.Choice([m.value for m in LaplaceMode]), default=None,
    help="SBS 간섭 Laplace 변환 모드",
)
@click.option("--out", "-o", type=click.Path(dir_okay=False), default=None, help="리포트 JSON 저장 경로")
def coverage(
    config: str | None,
    study: str | None,
    resources: str | None,
    engine: str | None,
    policy: str | None,
    seed: int | None,
    trials: int | None,
    mode: str | None,
    out: str | None,
) -> None:
    """🎯 단일 점 커버리지 — 스터디의 network 설정 그대로 평가."""
    from hetpcp.engines.base import EvaluationRequest
    from hetpcp.engines.registry import default_registry
    from hetpcp.geometry.kernel import ClusterKernel

    manifest = _override(
        _load_study(config, study, resources),
        engine=engine or "analytic", policy=policy, trials=trials, mode=mode,
    )
    spec = manifest.spec
    params = spec.network.to_params()
    sim = spec.simulation if seed is None else spec.simulation.model_copy(update={"seed": seed})
    registry = default_registry()

    table = Table(title="🎯 커버리지", show_header=True, header_style="bold cyan")
    for column in ("엔진", "정책", "macro", "small", "total", "±95%", "A_m", "A_s", "처리율"):
        table.add_column(column, justify="right" if column not in ("엔진", "정책") else "left")

    reports: list[dict[str, Any]] = []
    failed = False
    for engine_kind in spec.sweep.engines:
        for association in spec.sweep.policy.policies():
            request = EvaluationRequest(
                params=params,
                kernel=ClusterKernel.gaussian(params.sigma_s),
                user_kernel=ClusterKernel.gaussian(params.sigma_u),
                policy=association,
                sim=sim,
                options=spec.analysis,
            )
            try:
                report = registry.get(engine_kind.value).evaluate(request)
            except (HetpcpError, ValueError) as e:
                failed = True
                error_console.print(
                    f"[red]✗ {engine_kind.value}/{association.value} 실패: {e}[/red]"
                )
                continue
            reports.append({"engine": engine_kind.value, **report.model_dump(mode="json")})
            table.add_row(
                engine_kind.value,
                association.value,
                _fmt(report.per_tier_coverage.macro),
                _fmt(report.per_tier_coverage.small),
                Text(_fmt(report.total_coverage), style="bold"),
                _fmt(report.provenance.half_width_95),
                _fmt(report.assoc_prob_avg.macro),
                _fmt(report.assoc_prob_avg.small),
                _fmt(report.throughput),
            )

    console.print()
    console.print(table)
    if out:
        Path(out).write_text(json.dumps(reports, indent=2), encoding="utf-8")
        console.print(f"[dim]→ {out}[/dim]")
    if failed:
        sys.exit(1)


# ─── hetpcp sweep ──────────────────────────────────────


@cli.command()
@_config_option
@_study_option
@_resources_option
@click.option(
    "--from-manifest",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="이전 실행의 manifest.json 으로 재실행",
)
@_engine_option
@_policy_option
@_seed_option
@_trials_option
@click.option("--workers", "-w", type=click.IntRange(min=1), default=1, help="동시 평가 점 수")
@click.option(
    "--out", "-o", type=click.Path(file_okay=False), default="out", help="출력 디렉토리"
)
def sweep(
    config: str | None,
    study: str | None,
    resources: str | None,
    from_manifest: str | None,
    engine: str | None,
    policy: str | None,
    seed: int | None,
    trials: int | None,
    workers: int,
    out: str,
) -> None:
    """📈 파라미터 스윕 — results.csv 와 manifest.json 을 --out 에 기록."""
    from hetpcp.io.results import read_manifest, write_csv, write_manifest
    from hetpcp.orchestration.engine import run_sweep

    if from_manifest:
        previous = read_manifest(from_manifest)
        manifest = previous.study_manifest()
        seed = previous.seed if seed is None else seed
    else:
        manifest = _load_study(config, study, resources)
    manifest = _override(manifest, engine=engine, policy=policy, trials=trials)
    engines = ", ".join(e.value for e in manifest.spec.sweep.engines)
    boot_log(f"hetpcp v{__version__} — 스터디 '{manifest.metadata.name}' ({engines})")

    result = run_sweep(manifest, seed=seed, workers=workers)

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = write_csv(result.rows, out_dir / RESULTS_CSV)
    run = result.manifest.model_copy(update={"csv_file": RESULTS_CSV})
    manifest_path = write_manifest(run, out_dir / MANIFEST_JSON)

    ok_points = sum(1 for p in run.points if p.success)
    console.print()
    style = "green" if result.success else "red"
    mark = "✓" if result.success else "✗"
    console.print(
        Panel(
            f"[{style} bold]{mark}[/{style} bold] {manifest.metadata.name}: "
            f"{ok_points}/{len(run.points)} 점 성공, {len(result.rows)} 행 "
            f"({run.wall_clock_seconds:.1f}s)\n"
            f"[dim]CSV      {csv_path}\nmanifest {manifest_path}[/dim]",
            style=style,
        )
    )
    if not result.success:
        sys.exit(1)


# ─── hetpcp validate ───────────────────────────────────


@cli.command()
@click.option("--quick", is_flag=True, help="축소 프로파일 (시행 수/격자 축소)")
@_seed_option
@_trials_option
@click.option("--out", "-o", type=click.Path(dir_okay=False), default=None, help="결과 JSON")
def validate(quick: bool, seed: int | None, trials: int | None, out: str | None) -> None:
    """✅ 수용 검증 — 해석/시뮬레이션 교차검증과 정성적 성질 점검."""
    from hetpcp.acceptance import AcceptanceProfile, AcceptanceSuite

    profile = AcceptanceProfile.quick() if quick else AcceptanceProfile()
    overrides: dict[str, Any] = {}
    if seed is not None:
        overrides["seed"] = seed
    if trials is not None:
        overrides["trials"] = trials
    if overrides:
        profile = profile.model_copy(update=overrides)

    boot_log(f"수용 검증 시작 — {'quick' if quick else 'full'} 프로파일, 시행 {profile.trials}")
    results = AcceptanceSuite(profile).run()

    table = Table(title="✅ 수용 검증", show_header=True, header_style="bold cyan")
    table.add_column("검사", style="bold")
    table.add_column("결과", justify="center")
    table.add_column("상세")
    table.add_column("시간", justify="right", style="dim")
    for r in results:
        status = Text("✓", style="green bold") if r.passed else Text("✗", style="red bold")
        table.add_row(r.name, status, r.detail, f"{r.duration_ms / 1000:.1f}s")
    console.print()
    console.print(table)

    if out:
        payload = [r.to_dict() for r in results]
        Path(out).write_text(json.dumps(payload, indent=2, default=float), encoding="utf-8")

    failed = [r.name for r in results if not r.passed]
    if failed:
        error_console.print(f"[red]✗ 실패: {', '.join(failed)}[/red]")
        sys.exit(1)
    console.print(Panel("[green bold]✓[/green bold] 모든 검사 통과", style="green"))


# ─── hetpcp plot ───────────────────────────────────────


@cli.command()
@click.option(
    "--manifest", "-m",
    type=click.Path(exists=True, dir_okay=False),
    required=True,
    help="sweep 이 만든 manifest.json",
)
@click.option("--figure", "-f", required=True, help="그림 ID (fig2 … fig9)")
@click.option("--out", "-o", type=click.Path(file_okay=False), default=".", help="스크립트 위치")
def plot(manifest: str, figure: str, out: str) -> None:
    """🖼 그림 재현 스크립트 생성 (matplotlib)."""
    from hetpcp.io.plots import emit_plot_script

    try:
        path = emit_plot_script(manifest, figure, out)
    except PlotSpecError as e:
        error_console.print(f"[red]✗ {e}[/red]")
        sys.exit(1)
    console.print(f"[green]✓[/green] {path}")


# ─── hetpcp studies ────────────────────────────────────


@cli.command()
@_resources_option
def studies(resources: str | None) -> None:
    """📚 번들 스터디 목록 (resources/studies/*.yaml)."""
    from hetpcp.scanner import StudyScanner

    result = StudyScanner(_resolve_resources_dir(resources)).scan_all()

    table = Table(title="📚 스터디", show_header=True, header_style="bold cyan")
    table.add_column("이름", style="bold")
    table.add_column("그림", justify="center")
    table.add_column("스윕")
    table.add_column("엔진")
    table.add_column("정책", justify="center")
    table.add_column("설명", style="dim")
    for s in result.studies:
        sweep_spec = s.spec.sweep
        series = f" × {sweep_spec.series.variable.value}" if sweep_spec.series else ""
        table.add_row(
            s.metadata.name,
            s.metadata.figure or "—",
            f"{sweep_spec.variable.value}{series}",
            ", ".join(e.value for e in sweep_spec.engines),
            sweep_spec.policy.value,
            s.metadata.description,
        )
    console.print()
    console.print(table)

    if result.errors:
        _print_issues(result.errors)
        sys.exit(1)


def main() -> None:
    cli(auto_envvar_prefix="HETPCP")


if __name__ == "__main__":
    main()
