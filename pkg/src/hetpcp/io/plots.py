"""플롯 스크립트 생성 — 매니페스트의 CSV 를 읽어 그림 하나를 그리는 독립 스크립트.

생성된 스크립트는 pandas + matplotlib 만 필요하며 hetpcp 를 import 하지 않는다.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from string import Template

import structlog

from hetpcp import __version__
from hetpcp.errors import PlotSpecError
from hetpcp.io.results import read_manifest
from hetpcp.models.study import SweepVariable

logger = structlog.get_logger()


@dataclass(frozen=True)
class FigureSpec:
    title: str
    x_variable: SweepVariable
    metric: str  # coverage | throughput | assoc_prob
    tiers: tuple[str, ...]
    policies: tuple[str, ...]
    x_label: str
    y_label: str
    mark_max: bool = False


FIGURES: dict[str, FigureSpec] = {
    "fig2": FigureSpec(
        "Coverage vs active SBSs per cluster (P1)", SweepVariable.NBAR_AS, "coverage",
        ("total",), ("p1",), "average active SBSs per cluster", "coverage probability",
    ),
    "fig3": FigureSpec(
        "Coverage vs active SBSs per cluster (P2)", SweepVariable.NBAR_AS, "coverage",
        ("total",), ("p2",), "average active SBSs per cluster", "coverage probability",
    ),
    "fig4": FigureSpec(
        "Throughput vs active SBSs per cluster (P1)", SweepVariable.NBAR_AS, "throughput",
        ("total",), ("p1",), "average active SBSs per cluster", "throughput [bit/s/Hz/km²]",
    ),
    "fig5": FigureSpec(
        "Throughput vs active SBSs per cluster (P2)", SweepVariable.NBAR_AS, "throughput",
        ("total",), ("p2",), "average active SBSs per cluster", "throughput [bit/s/Hz/km²]",
    ),
    "fig6": FigureSpec(
        "Per-tier coverage vs SBS spread", SweepVariable.SIGMA_S, "coverage",
        ("macro", "small", "total"), ("p1", "p2"), "σ_s [km]", "coverage probability",
    ),
    "fig7": FigureSpec(
        "Association probability vs SBS spread", SweepVariable.SIGMA_S, "assoc_prob",
        ("macro", "small"), ("p1", "p2"), "σ_s [km]", "association probability",
    ),
    "fig8": FigureSpec(
        "Coverage vs distance threshold (series: active SBSs)", SweepVariable.D, "coverage",
        ("total",), ("p2",), "D [km]", "coverage probability", mark_max=True,
    ),
    "fig9": FigureSpec(
        "Coverage vs distance threshold (series: spread)", SweepVariable.D, "coverage",
        ("total",), ("p2",), "D [km]", "coverage probability", mark_max=True,
    ),
}

_SCRIPT = Template('''#!/usr/bin/env python3
"""$title — generated by hetpcp $version from $manifest_name."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

CSV = Path($csv_path)
METRIC = "$metric"
TIERS = $tiers
POLICIES = $policies
MARK_MAX = $mark_max

df = pd.read_csv(CSV)
df = df[(df["status"] == "ok") & df["tier"].isin(TIERS) & df["policy"].isin(POLICIES)]

fig, ax = plt.subplots(figsize=(6.4, 4.8))
for (series, policy, tier), part in df.groupby(["series_value", "policy", "tier"], dropna=False):
    label = f"{policy} {tier}"
    if pd.notna(series):
        label += f", {part['series_var'].iloc[0]}={series:g}"
    analytic = part[part["engine"] == "analytic"].sort_values("value")
    simulated = part[part["engine"] == "simulation"].sort_values("value")
    if not analytic.empty:
        ax.plot(analytic["value"], analytic[METRIC], "-", label=label)
    if not simulated.empty:
        yerr = simulated["ci_half_width"] if METRIC == "coverage" else None
        ax.errorbar(
            simulated["value"], simulated[METRIC], yerr=yerr, fmt="o", mfc="none",
            label=f"{label} (sim)",
        )
    if MARK_MAX:
        ref = analytic if not analytic.empty else simulated
        best = ref.loc[ref[METRIC].idxmax()]
        ax.plot(best["value"], best[METRIC], "k*", markersize=12)

ax.set_title("$title")
ax.set_xlabel("$x_label")
ax.set_ylabel("$y_label")
ax.grid(alpha=0.3)
ax.legend(fontsize="small")
fig.tight_layout()
out = Path(__file__).with_suffix(".png")
fig.savefig(out, dpi=150)
print(out)
''')


def emit_plot_script(manifest_path: str | Path, figure_id: str, out_dir: str | Path) -> Path:
    """매니페스트 + 그림 ID → 플롯 스크립트 경로.

    Raises:
        PlotSpecError: 모르는 그림 ID, 빈 매니페스트, 스윕 변수 불일치, CSV 없음
    """
    spec = FIGURES.get(figure_id)
    if spec is None:
        raise PlotSpecError(f"알 수 없는 그림 '{figure_id}'. 사용 가능: {sorted(FIGURES)}")
    manifest_path = Path(manifest_path)
    run = read_manifest(manifest_path)
    ok_points = [p for p in run.points if any(r.status == "ok" for r in p.results)]
    if not ok_points:
        raise PlotSpecError(f"매니페스트에 성공한 점이 없습니다: {manifest_path}")
    sweep_var = run.study_manifest().spec.sweep.variable
    if sweep_var is not spec.x_variable:
        raise PlotSpecError(
            f"{figure_id} 는 {spec.x_variable.value} 스윕이 필요합니다 (매니페스트: {sweep_var.value})"
        )
    if run.csv_file is None or not (manifest_path.parent / run.csv_file).exists():
        raise PlotSpecError(f"매니페스트의 CSV 파일을 찾을 수 없습니다: {run.csv_file}")

    script = _SCRIPT.substitute(
        title=spec.title,
        version=__version__,
        manifest_name=manifest_path.name,
        csv_path=repr(str((manifest_path.parent / run.csv_file).resolve())),
        metric=spec.metric,
        tiers=repr(list(spec.tiers)),
        policies=repr(list(spec.policies)),
        mark_max=repr(spec.mark_max),
        x_label=spec.x_label,
        y_label=spec.y_label,
    )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"plot_{figure_id}.py"
    path.write_text(script, encoding="utf-8")
    logger.debug("plot_script_written", figure=figure_id, path=str(path))
    return path
