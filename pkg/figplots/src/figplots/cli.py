"""Render simulation run directories into figure panels.

Example:
    figplots --kind timeseries --in runs/fig3 runs/fig3_control \\
             --channels n_1 n_N --out figs/fig3_traces.png
"""

from __future__ import annotations

import argparse
import sys

from .panels import PANEL_KINDS, PanelSpec, render


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="figplots", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--kind", required=True, choices=PANEL_KINDS)
    p.add_argument("--in", dest="inputs", nargs="+", required=True,
                   help="run directories (or data files) to read")
    p.add_argument("--out", required=True, help="image file to write")
    p.add_argument("--channels", nargs="*", default=[],
                   help="channel names for timeseries panels")
    p.add_argument("--title", default="")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        path = render(PanelSpec(kind=args.kind, inputs=tuple(args.inputs), out=args.out,
                                channels=tuple(args.channels), title=args.title))
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
