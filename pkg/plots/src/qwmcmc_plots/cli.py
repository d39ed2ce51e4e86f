"""Command-line entry point: ``qwmcmc-plot <kind> --in <dir> --out <file>``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import DEFAULT_CMAP, KINDS, FigureRequest, PlotError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwmcmc-plot",
        description="Render figures from qwmcmc experiment outputs",
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding the runner's output files")
    parser.add_argument("--out", dest="out_file", required=True,
                        help="output image path (.svg or .pdf)")
    parser.add_argument("--colormap", default=DEFAULT_CMAP,
                        help=f"matplotlib colormap for heatmaps (default {DEFAULT_CMAP})")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(
            FigureRequest(
                kind=args.kind,
                in_dir=Path(args.in_dir),
                out_file=Path(args.out_file),
                colormap=args.colormap,
            )
        )
    except PlotError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
