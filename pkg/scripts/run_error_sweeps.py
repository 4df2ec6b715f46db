#!/usr/bin/env python3
"""Reproduce the headline accuracy sweeps as CSV files under results/.

Writes:
  results/rmse_vs_inputs_pm.csv       cemux vs the basic hardwired adder,
                                      random-sign 1/M weights, N = 2^9
  results/rmse_vs_inputs_ablation.csv cemux and its ablation variants,
                                      uniform weights/values, N = 2^10
"""

import sys
from pathlib import Path

from scmux.cli import main

RESULTS = Path(__file__).resolve().parent.parent / "results"


def run() -> int:
    RESULTS.mkdir(exist_ok=True)
    rc = main(
        [
            "sweep-m",
            "--designs", "cemux,basic_hardwired",
            "--n", "9",
            "--m-min", "3",
            "--m-max", "8",
            "--runs", "1000",
            "--weight-dist", "pm",
            "--seed", "7",
            "--out", str(RESULTS / "rmse_vs_inputs_pm.csv"),
        ]
    )
    rc |= main(
        [
            "sweep-m",
            "--designs", "cemux,cemux_nofc,cemux_nops,cemux_lfsr,cemux_wbg,cemux_biased",
            "--n", "10",
            "--m-min", "3",
            "--m-max", "8",
            "--runs", "1000",
            "--normalize",
            "--seed", "7",
            "--out", str(RESULTS / "rmse_vs_inputs_ablation.csv"),
        ]
    )
    print(f"wrote {RESULTS}/rmse_vs_inputs_pm.csv and rmse_vs_inputs_ablation.csv")
    return rc


if __name__ == "__main__":
    sys.exit(run())
