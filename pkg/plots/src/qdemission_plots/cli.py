"""Command-line interface.

    qdemission-plot --recipe <file|fig1|fig2> --in <dir> --out <dir>
"""

from __future__ import annotations

import argparse
import sys

from .recipes import load_recipe
from .render import render


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qdemission-plot",
        description="Render figures from qdemission CSV sweep outputs")
    parser.add_argument("--recipe", required=True,
                        help="preset name (fig1, fig2) or a YAML recipe file")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="directory holding the CSV outputs")
    parser.add_argument("--out", required=True, help="figure output directory")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    recipe = load_recipe(args.recipe, args.in_dir)
    written = render(recipe, args.out)
    if not written:
        print("nothing rendered (no plottable input rows)")
        return 1
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
