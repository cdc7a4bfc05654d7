"""Figure rendering for simulator result CSVs."""

from .render import build_figure, render
from .schema import FigureDataError, ResultRow, read_rows
from .specs import FIGURES, FigureSpec, PanelSpec, SeriesStyle

__version__ = "0.1.0"

__all__ = [
    "FIGURES",
    "FigureDataError",
    "FigureSpec",
    "PanelSpec",
    "ResultRow",
    "SeriesStyle",
    "build_figure",
    "read_rows",
    "render",
]
