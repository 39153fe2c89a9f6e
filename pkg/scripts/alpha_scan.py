#!/usr/bin/env python3
"""Tabulate the shooting functional over a height grid and report the
sign-change brackets that pin down the periodic orbits."""

import argparse
import sys

from langmuir_lab import output, shooting


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--energy", type=float, default=-1.0)
    parser.add_argument("--lo", type=float, default=shooting.DEFAULT_GRID_RANGE[0])
    parser.add_argument("--hi", type=float, default=shooting.DEFAULT_GRID_RANGE[1])
    parser.add_argument("--n", type=int, default=shooting.DEFAULT_GRID_SIZE)
    parser.add_argument("--out", help="CSV path (default stdout)")
    args = parser.parse_args()

    grid = shooting.default_grid(args.lo, args.hi, args.n)
    results = shooting.scan_alpha(args.energy, grid)
    text = output.scan_csv(results)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    brackets = shooting.sign_change_brackets(results)
    for lo, hi in brackets:
        print(f"sign change on [{lo:.6f}, {hi:.6f}]", file=sys.stderr)
    if not brackets:
        print("no sign change on this grid", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
