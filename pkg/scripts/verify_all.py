#!/usr/bin/env python3
"""Run every built-in invariant suite and exit nonzero on any failure.

Usage: python scripts/verify_all.py
"""

import sys

from gphase import cli


if __name__ == "__main__":
    sys.exit(cli.main(["verify", "all"]))
