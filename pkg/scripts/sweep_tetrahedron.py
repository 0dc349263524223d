#!/usr/bin/env python3
"""Regenerate the concurrence-tetrahedron sweep data.

Walks the admissible region at the given grid step, constructs the basis for
each point, and records achieved concurrences plus the decider's verdict.
The face sum(x) = 1 comes out distinguishable, the interior indistinguishable.

    python scripts/sweep_tetrahedron.py --step 0.05 --output tetra_sweep.csv
"""

import argparse
import sys

from sepdisc.cli import main


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--step", type=float, default=0.05)
    parser.add_argument("--output", default="tetra_sweep.csv")
    args = parser.parse_args(argv)
    return main(["sweep", "--step", str(args.step), "--output", args.output])


if __name__ == "__main__":
    sys.exit(run())
