#!/usr/bin/env python3
"""Sign-measurement (1-bit) recovery across bit budgets at SNR=10 dB,
where roughly 9.75% of measurement signs are flipped by noise."""

import argparse
import sys
from pathlib import Path

from quantcs.experiment import (
    SweepConfig,
    parse_records_csv,
    run_sweep,
    summarize,
    write_summary_csv,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results/onebit"))
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--budgets", type=int, nargs="+", default=list(range(100, 1001, 100)))
    ap.add_argument("--full-scale", action="store_true", help="N=500, 200 trials")
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()

    config = SweepConfig(
        N=500 if args.full_scale else 200,
        K=10,
        snr_db=10.0,
        quantizer_kind="one-bit",
        bit_depth=1,
        bit_budgets=tuple(args.budgets),
        modes=("qvmp",),
        trials=200 if args.full_scale else args.trials,
        base_seed=9901,
    )
    args.out.mkdir(parents=True, exist_ok=True)
    records_path = args.out / "records.csv"
    with open(records_path, "w", newline="") as fh:
        failures = run_sweep(config, fh, workers=args.workers)
    rows = summarize(parse_records_csv(records_path.read_text()))
    with open(args.out / "summary.csv", "w", newline="") as fh:
        write_summary_csv(rows, fh)
    for r in rows:
        print(
            f"budget {r['bit_budget']:5d}: {r['rsnr_db_mean']:7.2f} dB "
            f"(+-{r['rsnr_db_stderr']:.2f}), support {r['support_size_mean']:.1f}"
        )
    return 2 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
