"""figgen command line: `figgen <csv> --kind <k> --out <png>`."""

from __future__ import annotations

import argparse
import sys

from .reader import MalformedCSV, MissingColumns
from .render import PLOT_KINDS, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="figgen",
        description="Render simulator CSV outputs as heatmaps or line plots",
    )
    ap.add_argument("csv", help="input CSV (simulator output contract)")
    ap.add_argument("--kind", required=True, choices=PLOT_KINDS)
    ap.add_argument("--out", required=True, help="output PNG path")
    ap.add_argument("--vmin", type=float, default=None, help="color scale lower bound")
    ap.add_argument("--vmax", type=float, default=None, help="color scale upper bound")
    ap.add_argument("--cmap", default="viridis")
    ap.add_argument("--title", default=None)
    ap.add_argument("--dpi", type=int, default=150)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        input_csv=args.csv,
        kind=args.kind,
        output=args.out,
        vmin=args.vmin,
        vmax=args.vmax,
        cmap=args.cmap,
        title=args.title,
        dpi=args.dpi,
    )
    try:
        render(spec)
    except (MalformedCSV, MissingColumns) as e:
        print(f"figgen: {e}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
