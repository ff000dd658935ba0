"""Command line front end.

    render --kind <region|density|density-overlay|trajectory>
           --in <csv>[,csv2] --out <png>

Exit codes: 0 success, 2 bad arguments or input that fails validation.
"""
import argparse
import sys
from pathlib import Path

from .figures import KINDS, FigureSpec, SchemaError, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render", description="Render a figure from CSV experiment data")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="inputs", required=True,
                        help="input CSV path, or two comma-separated paths "
                             "for density-overlay (scan first, sweep second)")
    parser.add_argument("--out", required=True, help="output PNG path")
    parser.add_argument("--xlabel")
    parser.add_argument("--ylabel")
    parser.add_argument("--vmin", type=float,
                        help="lower color bound (log10 residual)")
    parser.add_argument("--vmax", type=float,
                        help="upper color bound (log10 residual)")
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    inputs = tuple(Path(p) for p in args.inputs.split(","))
    try:
        spec = FigureSpec(kind=args.kind, inputs=inputs,
                          output=Path(args.out), xlabel=args.xlabel,
                          ylabel=args.ylabel, vmin=args.vmin, vmax=args.vmax)
        render(spec)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"render: {exc}", file=sys.stderr)
        return 2
    return 0


def entry() -> None:
    sys.exit(main())
