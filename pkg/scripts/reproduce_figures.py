#!/usr/bin/env python3
"""Emit every plot-ready CSV dataset into an output directory.

Usage: python scripts/reproduce_figures.py [--out DIR] [--points N]
"""

import argparse
import pathlib
import sys

from gphase import cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="figures", help="output directory")
    parser.add_argument("--points", type=int, default=121)
    parser.add_argument("--eta-points", type=int, default=21)
    args = parser.parse_args()

    out_dir = pathlib.Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in cli.FIGURES:
        target = out_dir / f"{name}.csv"
        code = cli.main(
            [
                "figure", name,
                "--points", str(args.points),
                "--eta-points", str(args.eta_points),
                "--output", str(target),
            ]
        )
        if code != 0:
            return code
        print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
