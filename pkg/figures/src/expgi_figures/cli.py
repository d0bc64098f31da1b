"""Command-line entry point: one figure per invocation."""

import argparse
import sys
from pathlib import Path

from .render import FIGURE_KINDS, FigureCsvError, FigureSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="expgi-figures",
        description="render operating-characteristic figures from a results CSV",
    )
    parser.add_argument("--input", required=True, type=Path, help="results CSV")
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    parser.add_argument("--output", required=True, type=Path, help="image file path")
    args = parser.parse_args(argv)
    try:
        render(FigureSpec(args.input, args.kind, args.output))
    except (FigureCsvError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
