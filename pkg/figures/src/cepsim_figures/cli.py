"""make-figures: render simulator CSVs into the nine SVG figures.

Exit codes: 0 success, 1 invalid usage, 2 missing or malformed input data.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import render
from .schema import FigureDataError
from .specs import FIGURES


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise _UsageError(message)


def _parse_figure_list(raw: str) -> list[int]:
    try:
        ids = sorted({int(part) for part in raw.split(",") if part.strip()})
    except ValueError as exc:
        raise _UsageError(f"--figures expects integers, got {raw!r}") from exc
    bad = [i for i in ids if i not in FIGURES]
    if bad or not ids:
        raise _UsageError(f"--figures entries must lie in 1..9, got {raw!r}")
    return ids


def main(argv: list[str] | None = None) -> int:
    parser = _Parser(prog="make-figures", description=__doc__.splitlines()[0])
    parser.add_argument("--in-dir", required=True,
                        help="directory holding the simulator CSVs")
    parser.add_argument("--out-dir", required=True,
                        help="directory for the SVG output")
    parser.add_argument("--figures", default="1,2,3,4,5,6,7,8,9",
                        help="comma-separated figure ids (default: all nine)")
    try:
        args = parser.parse_args(argv)
        figure_ids = _parse_figure_list(args.figures)
        out_dir = Path(args.out_dir)
        for figure_id in figure_ids:
            out_path = render(figure_id, args.in_dir, out_dir / f"fig{figure_id}.svg")
            print(f"wrote {out_path}")
        return 0
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FigureDataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
