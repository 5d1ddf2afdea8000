#!/usr/bin/env python3
"""Regenerate every figure dataset into ./figures with a fixed seed.

Each block is one CLI invocation, so the same artifacts can be produced
by hand with `axionkit <subcommand> ...`; the manifests written next to
the outputs allow byte-identical regeneration later.
"""

import pathlib
import sys

from axionkit.cli import main

SEED = 20250810
ROOT = pathlib.Path(__file__).resolve().parent.parent / "figures"

RUNS = [
    ("envelope", ["--span-days", "366"]),
    ("daily-rms", ["--trials", "24"]),
    ("psd", []),
    ("triplet", ["--span-days", "240"]),
    ("linewidth", ["--masses", "1,5,10"]),
    ("sensitivity", ["--preset", "current", "--gains", "all"]),
    ("sensitivity", ["--preset", "future", "--gains", "all"]),
]


def run_all() -> int:
    for index, (subcommand, extra) in enumerate(RUNS):
        out = ROOT / f"{index:02d}_{subcommand}"
        argv = [subcommand, "--out", str(out), "--seed", str(SEED), *extra]
        print(f"$ axionkit {' '.join(argv)}")
        code = main(argv)
        if code != 0:
            print(f"failed with exit code {code}", file=sys.stderr)
            return code
    print(f"\nall figure datasets under {ROOT}")
    return 0


if __name__ == "__main__":
    sys.exit(run_all())
