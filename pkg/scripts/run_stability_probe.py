#!/usr/bin/env python3
"""Stretched-ball stability probe on the standard grid.

Extra flags are passed through to the `fracshape stability-probe`
subcommand and win over the defaults below.
"""

import sys

from fracshape.cli import main

DEFAULTS = ["stability-probe", "--s", "0.5", "--eps", "0.02,0.01,0.005",
            "--out", "artifacts"]

if __name__ == "__main__":
    sys.exit(main(DEFAULTS + sys.argv[1:]))
