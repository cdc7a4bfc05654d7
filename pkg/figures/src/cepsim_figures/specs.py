"""Figure definitions: input CSV panels and per-series line styles.

Series ids are the simulator's predictor ids. Style conventions: suboptimal
variants are dotted, deterministic-p variants dashed, everything else solid;
series with no swept parameter come out of the simulator as single rows and
are drawn as horizontal reference lines by the renderer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# tab10, pinned as hex so output does not depend on the matplotlib version
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

SUBOPTIMAL_SUFFIX = "-suboptimal"
DETERMINISTIC_SUFFIX = "-det"


@dataclass(frozen=True)
class SeriesStyle:
    label: str
    color: str
    linestyle: str


@dataclass(frozen=True)
class PanelSpec:
    csv_name: str
    title: str


@dataclass(frozen=True)
class FigureSpec:
    figure_id: int
    kind: str  # "sweep" or "histogram"
    panels: tuple[PanelSpec, ...]
    styles: dict[str, SeriesStyle] = field(default_factory=dict)
    x_label: str = ""
    y_label: str = "quality"


def _linestyle(series_id: str) -> str:
    if series_id.endswith(SUBOPTIMAL_SUFFIX):
        return ":"
    if series_id.endswith(DETERMINISTIC_SUFFIX):
        return "--"
    return "-"


def _styles(series_ids: tuple[str, ...]) -> dict[str, SeriesStyle]:
    """Assign palette colors so a base series and its variants share a color."""
    styles: dict[str, SeriesStyle] = {}
    base_colors: dict[str, str] = {}
    for series_id in series_ids:
        base = series_id
        for suffix in (SUBOPTIMAL_SUFFIX, DETERMINISTIC_SUFFIX):
            if base.endswith(suffix):
                base = base[: -len(suffix)]
        if base not in base_colors:
            base_colors[base] = PALETTE[len(base_colors) % len(PALETTE)]
        styles[series_id] = SeriesStyle(
            label=series_id,
            color=base_colors[base],
            linestyle=_linestyle(series_id),
        )
    return styles


_RICEP_FAMILY = (
    "ricep-1", "ricep-10", "ricep-100",
    "bicep-1", "bicep-10", "bicep-100",
    "semi-bicep-1", "semi-bicep-10", "semi-bicep-100",
    "e-bayes",
)

FIGURES: dict[int, FigureSpec] = {
    1: FigureSpec(
        figure_id=1,
        kind="sweep",
        panels=(
            PanelSpec("fig1_Y10.csv", "10 labels"),
            PanelSpec("fig1_Y100.csv", "100 labels"),
        ),
        styles=_styles(("cep", "cep-suboptimal", "e-bayes", "e-bayes-suboptimal")),
        x_label="ordinariness sigma",
    ),
    2: FigureSpec(
        figure_id=2,
        kind="sweep",
        panels=(
            PanelSpec("fig2_Y2.csv", "2 labels"),
            PanelSpec("fig2_Y10.csv", "10 labels"),
            PanelSpec("fig2_Y100.csv", "100 labels"),
        ),
        styles=_styles(("icp", "p-bayes", "icp-det", "p-bayes-det")),
        x_label="proper training size",
    ),
    3: FigureSpec(
        figure_id=3,
        kind="sweep",
        panels=(
            PanelSpec("fig3_Y2.csv", "2 labels"),
            PanelSpec("fig3_Y10.csv", "10 labels"),
            PanelSpec("fig3_Y100.csv", "100 labels"),
        ),
        styles=_styles(
            ("icep", "icep-suboptimal", "e-bayes", "e-bayes-suboptimal")
        ),
        x_label="proper training size",
    ),
    4: FigureSpec(
        figure_id=4,
        kind="sweep",
        panels=(
            PanelSpec("fig4_Y10.csv", "10 labels"),
            PanelSpec("fig4_Y100.csv", "100 labels"),
        ),
        styles=_styles(("ccp", "cp", "p-bayes")),
        x_label="number of folds",
    ),
    5: FigureSpec(
        figure_id=5,
        kind="sweep",
        panels=(
            PanelSpec("fig5_Y10.csv", "10 labels"),
            PanelSpec("fig5_Y100.csv", "100 labels"),
            PanelSpec("fig5_Y2_inverse.csv", "2 labels, inverse"),
        ),
        styles=_styles(
            ("ccep", "ccep-suboptimal", "ccep-inverse", "icep", "e-bayes")
        ),
        x_label="number of folds",
    ),
    6: FigureSpec(
        figure_id=6,
        kind="sweep",
        panels=(PanelSpec("fig6_Y10.csv", "10 labels"),),
        styles=_styles(("ccep",) + _RICEP_FAMILY),
        x_label="number of folds",
    ),
    7: FigureSpec(
        figure_id=7,
        kind="sweep",
        panels=(PanelSpec("fig7_Y100.csv", "100 labels"),),
        styles=_styles(("ccep",) + _RICEP_FAMILY),
        x_label="number of folds",
    ),
    8: FigureSpec(
        figure_id=8,
        kind="sweep",
        panels=(PanelSpec("fig8_Y2_inverse.csv", "2 labels, inverse"),),
        styles=_styles(("ccep-inverse",) + _RICEP_FAMILY),
        x_label="number of folds",
    ),
    9: FigureSpec(
        figure_id=9,
        kind="histogram",
        panels=(PanelSpec("fig9_histogram.csv", "repeated-split e-values"),),
        x_label="e-value",
        y_label="count",
    ),
}

HISTOGRAM_VALUE_SERIES = "icep-evalue"
HISTOGRAM_MEAN_SERIES = "icep-evalue-mean"
