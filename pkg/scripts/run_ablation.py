"""Skip-connection and L1-loss ablation over several seeds.

Trains {all skips + L1, no L1, single skip} per seed on the smoke
dataset, evaluates final validation L1 on the holdout split, and writes
per-variant loss curves plus a summary CSV. The full-model median is
expected to beat both ablations.
"""

import argparse
import sys
import time
from pathlib import Path

from routecast.cgan import TrainConfig
from routecast.cli import run_ablation


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", required=True, help="dataset directory")
    ap.add_argument("--epochs", type=int, default=12)
    ap.add_argument("--base-width", type=int, default=32)
    ap.add_argument("--seeds", default="0,1,2", help="comma-separated seeds")
    ap.add_argument("--out", default="ablation_runs", help="output directory")
    args = ap.parse_args(argv)

    seeds = [int(s) for s in args.seeds.split(",")]
    t0 = time.perf_counter()
    report, medians = run_ablation(
        args.data,
        Path(args.out),
        seeds,
        TrainConfig(epochs=args.epochs),
        base_width=args.base_width,
    )
    print(f"trained {len(report.rows)} runs in {time.perf_counter() - t0:.1f}s")
    for row in report.rows:
        print(f"  {row.name:16s} val_l1 {row.val_l1:.4f}  acc {row.per_pixel_acc:.4f}")
    for name, med in sorted(medians.items()):
        print(f"median {name:12s} {med:.4f}")

    full = medians["all_l1"]
    ok = full < medians["no_l1"] and full < medians["single_skip"]
    print("full model beats both ablations" if ok else "ablation ordering NOT satisfied")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
