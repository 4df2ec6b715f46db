#!/usr/bin/env python3
"""Variance-component sweeps over the input count, as CSV under results/.

Two settings mirror the unoptimized and fully optimized mux adders:
noisy sampling with uncorrelated inputs, and precise sampling with fully
correlated inputs (where the sampling component is exactly zero and the
correlation component goes negative). Multiply columns by N to read them on
a normalized scale.
"""

import sys
from pathlib import Path

from scmux.cli import main

RESULTS = Path(__file__).resolve().parent.parent / "results"


def run() -> int:
    RESULTS.mkdir(exist_ok=True)
    common = [
        "--model", "hypergeometric",
        "--m-list", "2,4,8,16,32,64,128,256",
        "--n", "8",
        "--runs", "3000",
        "--seed", "11",
    ]
    rc = main(
        [
            "decompose",
            "--sampling", "noisy",
            "--scc", "0",
            *common,
            "--out", str(RESULTS / "decomposition_unoptimized.csv"),
        ]
    )
    rc |= main(
        [
            "decompose",
            "--sampling", "precise",
            "--scc", "1",
            *common,
            "--out", str(RESULTS / "decomposition_optimized.csv"),
        ]
    )
    print(f"wrote {RESULTS}/decomposition_unoptimized.csv and decomposition_optimized.csv")
    return rc


if __name__ == "__main__":
    sys.exit(run())
