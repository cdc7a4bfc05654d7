"""Reader for the simulator's results-CSV schema.

This package talks to the simulator exclusively through these files; the
header is fixed and anything that does not parse against it is an error
naming the offending file or column.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

HEADER = ("predictor_id", "parameter", "mean_quality", "std_error",
          "iterations", "seed")


class FigureDataError(Exception):
    """Input CSVs are missing, empty, or do not match the schema."""


@dataclass(frozen=True)
class ResultRow:
    predictor_id: str
    parameter: float
    mean_quality: float
    std_error: float
    iterations: int
    seed: int


def read_rows(path: str | Path) -> list[ResultRow]:
    """Parse one results CSV; header-only files are an error."""
    path = Path(path)
    if not path.exists():
        raise FigureDataError(f"input CSV not found: {path}")
    with path.open("r", newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise FigureDataError(f"{path} is empty")
        if tuple(header) != HEADER:
            expected = ",".join(HEADER)
            raise FigureDataError(
                f"{path} has header {','.join(header)!r}, expected {expected!r}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(HEADER):
                raise FigureDataError(
                    f"{path}:{lineno} has {len(row)} columns, expected {len(HEADER)}"
                )
            try:
                rows.append(
                    ResultRow(
                        predictor_id=row[0],
                        parameter=float(row[1]),
                        mean_quality=float(row[2]),
                        std_error=float(row[3]),
                        iterations=int(row[4]),
                        seed=int(row[5]),
                    )
                )
            except ValueError as exc:
                raise FigureDataError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise FigureDataError(f"{path} contains a header but no data rows")
    return rows


def group_series(rows: list[ResultRow]) -> dict[str, list[ResultRow]]:
    """Rows per predictor id, in file order."""
    series: dict[str, list[ResultRow]] = {}
    for row in rows:
        series.setdefault(row.predictor_id, []).append(row)
    return series
