#!/usr/bin/env python3
"""Download the demo texts listed in manifests/*.ini (or the given manifests)."""

import sys
from pathlib import Path

from zipfkit.cli import main

ROOT = Path(__file__).resolve().parents[1]


def run(argv):
    manifests = argv or sorted(str(p) for p in (ROOT / "manifests").glob("*.ini"))
    worst = 0
    for m in manifests:
        print(f"== {m}")
        worst = max(worst, main(["fetch", m]))
    return worst


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
