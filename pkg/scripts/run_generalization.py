"""Train on the smoke dataset and report held-out forecast accuracy.

Uses the deterministic 80/20 split (every fifth item is held out),
trains the default model for the full epoch budget, then compares
per-pixel accuracy against the all-zero-utilization baseline.
"""

import argparse
import sys
import time
from pathlib import Path

from routecast.cgan import Predictor, TrainCallbacks, TrainConfig, default_configs, train
from routecast.dataset import layout_of, load_items, load_manifest
from routecast.metrics import per_pixel_accuracy


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", required=True, help="dataset directory")
    ap.add_argument("--epochs", type=int, default=50)
    ap.add_argument("--base-width", type=int, default=None)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tau", type=float, default=0.1)
    ap.add_argument("--out", default=None, help="optional checkpoint path")
    args = ap.parse_args(argv)

    manifest = load_manifest(args.data)
    layout = layout_of(manifest)
    train_items = load_items(args.data, manifest, split="train")
    hold_items = load_items(args.data, manifest, split="holdout")
    print(f"train {len(train_items)}  holdout {len(hold_items)}")
    pairs = [(it["x"], it["truth"]) for it in train_items]

    w = pairs[0][0].shape[1]
    g_cfg, d_cfg = default_configs(w=w, base_width=args.base_width)[:2]
    t_cfg = TrainConfig(epochs=args.epochs, seed=args.seed)

    t0 = time.perf_counter()

    def on_epoch(epoch, loop):
        if epoch % 5 == 0 or epoch == args.epochs:
            print(f"epoch {epoch:3d}  {time.perf_counter() - t0:7.1f}s", flush=True)

    ckpt = train(pairs, g_cfg, d_cfg, t_cfg, TrainCallbacks(on_epoch=on_epoch),
                 manifest_hash=manifest["netlist_hash"])
    print(f"train time {time.perf_counter() - t0:.1f}s")

    predict = Predictor(ckpt)
    preds = [predict(it["x"]) for it in hold_items]
    rep = per_pixel_accuracy(preds, [it["util"] for it in hold_items], layout, tau=args.tau)
    margin = rep.per_pixel_acc - rep.baseline_acc
    print(f"holdout acc {rep.per_pixel_acc:.4f}  baseline {rep.baseline_acc:.4f}  margin {margin:+.4f}")

    if args.out:
        ckpt.save(Path(args.out))
        print(f"wrote {args.out}")
    return 0 if margin >= 0.10 else 1


if __name__ == "__main__":
    sys.exit(main())
