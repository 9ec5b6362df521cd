"""Script entry point: render one verification figure from a CSV artifact."""

from __future__ import annotations

import argparse
import sys

from .csvio import SchemaError
from .figures import FigureKind, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covert-sense-plots",
        description="Render verification figures from covert-sense CSV output.",
    )
    parser.add_argument("--kind", required=True,
                        choices=[k.value for k in FigureKind])
    parser.add_argument("--input", required=True, help="schema=1 CSV file")
    parser.add_argument("--output", required=True,
                        help="output image path; .png and .svg are written")
    parser.add_argument("--linear-x", action="store_true")
    parser.add_argument("--linear-y", action="store_true")
    parser.add_argument("--no-slope-guide", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        input_csv=args.input,
        kind=FigureKind(args.kind),
        output=args.output,
        log_x=not args.linear_x,
        log_y=not args.linear_y,
        slope_guide=not args.no_slope_guide,
    )
    try:
        for path in render(spec):
            print(path)
    except (SchemaError, OSError) as exc:
        print(f"covert-sense-plots: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
