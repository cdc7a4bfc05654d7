"""SVG rendering of the nine figures from simulator CSVs.

Output is deterministic: a fixed svg hash salt, no timestamps, and a pinned
style, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .schema import FigureDataError, ResultRow, group_series, read_rows  # noqa: E402
from .specs import (  # noqa: E402
    FIGURES,
    FigureSpec,
    HISTOGRAM_MEAN_SERIES,
    HISTOGRAM_VALUE_SERIES,
)

HISTOGRAM_BINS = 50
MEAN_LINE_COLOR = "red"

_RC = {
    "svg.hashsalt": "cepsim-figures",
    "figure.dpi": 100,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 8,
}


def _is_reference_line(rows: list[ResultRow]) -> bool:
    return len(rows) == 1 or all(math.isnan(r.parameter) for r in rows)


def _draw_sweep_panel(ax, rows: list[ResultRow], spec: FigureSpec,
                      csv_name: str) -> None:
    series = group_series(rows)
    unknown = [name for name in series if name not in spec.styles]
    if unknown:
        raise FigureDataError(
            f"{csv_name}: no style for series {', '.join(sorted(unknown))} "
            f"in figure {spec.figure_id}"
        )
    for name, style in spec.styles.items():
        if name not in series:
            continue
        points = series[name]
        if _is_reference_line(points):
            ax.axhline(
                points[0].mean_quality,
                color=style.color,
                linestyle=style.linestyle,
                linewidth=1.0,
                label=style.label,
            )
            continue
        points = sorted(points, key=lambda r: r.parameter)
        ax.plot(
            [r.parameter for r in points],
            [r.mean_quality for r in points],
            color=style.color,
            linestyle=style.linestyle,
            marker=".",
            markersize=3,
            linewidth=1.2,
            label=style.label,
        )
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    ax.legend(loc="best")


def _draw_histogram_panel(ax, rows: list[ResultRow], spec: FigureSpec,
                          csv_name: str) -> None:
    series = group_series(rows)
    if HISTOGRAM_VALUE_SERIES not in series:
        raise FigureDataError(
            f"{csv_name}: missing series {HISTOGRAM_VALUE_SERIES!r}"
        )
    if HISTOGRAM_MEAN_SERIES not in series:
        raise FigureDataError(
            f"{csv_name}: missing series {HISTOGRAM_MEAN_SERIES!r}"
        )
    values = np.array([r.mean_quality for r in series[HISTOGRAM_VALUE_SERIES]])
    mean_value = series[HISTOGRAM_MEAN_SERIES][0].mean_quality
    ax.hist(values, bins=HISTOGRAM_BINS, color="#1f77b4", edgecolor="none")
    ax.axvline(mean_value, color=MEAN_LINE_COLOR, linewidth=1.5,
               label=f"mean = {mean_value:.6g}")
    ax.set_xlabel(spec.x_label)
    ax.set_ylabel(spec.y_label)
    ax.legend(loc="best")


def build_figure(spec: FigureSpec, in_dir: str | Path):
    """Assemble one matplotlib figure from the panel CSVs; no file output."""
    in_dir = Path(in_dir)
    panel_rows = [read_rows(in_dir / panel.csv_name) for panel in spec.panels]
    with plt.rc_context(_RC):
        n = len(spec.panels)
        fig, axes = plt.subplots(1, n, figsize=(5.2 * n, 4.0), squeeze=False)
        for ax, panel, rows in zip(axes[0], spec.panels, panel_rows):
            if spec.kind == "histogram":
                _draw_histogram_panel(ax, rows, spec, panel.csv_name)
            else:
                _draw_sweep_panel(ax, rows, spec, panel.csv_name)
            ax.set_title(panel.title)
        fig.tight_layout()
    return fig


def render(figure_id: int, in_dir: str | Path, out_path: str | Path) -> Path:
    """Render one figure to SVG; nothing is written if the inputs are bad."""
    if figure_id not in FIGURES:
        raise FigureDataError(f"figure id must lie in 1..9, got {figure_id}")
    spec = FIGURES[figure_id]
    fig = build_figure(spec, in_dir)  # raises before any output on bad data
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    try:
        with plt.rc_context(_RC):
            fig.savefig(out_path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    return out_path
