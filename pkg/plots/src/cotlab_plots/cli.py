"""Command-line driver: one figure per invocation, or a JSON batch spec."""

from __future__ import annotations

import argparse
import json
import sys

from .figures import EmptyDataError, FigureSpec, SchemaMismatchError, render, render_all


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cotlab-plots")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render a single figure")
    p.add_argument("--kind", required=True,
                   choices=("hist-overlay", "cdf-overlay", "ladder", "ratio-scatter"))
    p.add_argument("--input", action="append", required=True,
                   help="input CSV (repeat for cdf-overlay: samples then report)")
    p.add_argument("--output", required=True, help="output .png or .svg path")
    p.add_argument("--title", default="")
    p.add_argument("--series", default="")
    p.add_argument("--xlabel", default="")
    p.add_argument("--ylabel", default="")

    p = sub.add_parser("batch", help="render figures from a JSON spec list")
    p.add_argument("--spec", required=True, help="JSON file: list of figure specs")
    p.add_argument("--manifest", default=None, help="manifest JSON output path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "render":
            spec = FigureSpec(
                kind=args.kind,
                inputs=tuple(args.input),
                output=args.output,
                title=args.title,
                series=args.series,
                xlabel=args.xlabel,
                ylabel=args.ylabel,
            )
            render(spec)
            print(spec.output, file=sys.stderr)
        else:
            with open(args.spec, encoding="utf-8") as fh:
                raw = json.load(fh)
            specs = [
                FigureSpec(
                    kind=item["kind"],
                    inputs=tuple(item["inputs"]),
                    output=item["output"],
                    title=item.get("title", ""),
                    series=item.get("series", ""),
                    xlabel=item.get("xlabel", ""),
                    ylabel=item.get("ylabel", ""),
                )
                for item in raw
            ]
            render_all(specs, manifest_path=args.manifest)
            print(f"rendered {len(specs)} figure(s)", file=sys.stderr)
        return 0
    except (SchemaMismatchError, EmptyDataError, ValueError, OSError) as exc:
        print(f"cotlab-plots: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
