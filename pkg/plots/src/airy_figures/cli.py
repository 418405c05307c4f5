"""Figure CLI: `plot --figure figN --in <run-dir> --out <image>`.

`--in` may repeat (fig6 takes up to three driven run directories) and is
omitted for fig4, which needs no simulation input.  Exit codes: 0 success,
2 bad arguments or invalid/missing input files.
"""

from __future__ import annotations

import argparse
import sys

from .io import InputError
from .render import FIGURE_IDS, PlotJob, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot", description="render a figure from simulation run artifacts"
    )
    parser.add_argument("--figure", required=True, choices=FIGURE_IDS)
    parser.add_argument(
        "--in",
        dest="inputs",
        action="append",
        default=[],
        help="simulation run directory (repeatable)",
    )
    parser.add_argument("--out", required=True, help="output image file")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = PlotJob(args.figure, args.inputs, args.out)
        path = render(job)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
