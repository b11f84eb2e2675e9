"""qflab-plot --figure figN --in dir --out file.png

Renders one figure from a qflab artifact directory.  Exits 1 with the
offending file and field named when an artifact is missing or malformed;
no image is written in that case.
"""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURES, render
from .io import ArtifactError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qflab-plot",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("--figure", required=True, choices=sorted(FIGURES),
                        help="figure id")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="experiment artifact directory")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        render(args.figure, args.in_dir, args.out)
    except ArtifactError as exc:
        print(f"artifact error: {exc}", file=sys.stderr)
        return 1
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
