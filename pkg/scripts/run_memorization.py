"""Overfit a small model on a handful of placement/congestion pairs.

Sanity experiment: if the net cannot memorize 8 pairs it will never
generalize. Prints a per-pixel accuracy trace and stops early once the
target is hit.
"""

import argparse
import sys
import time
from pathlib import Path

from routecast.cgan import (
    Predictor,
    TrainCallbacks,
    TrainConfig,
    default_configs,
    train,
)
from routecast.dataset import layout_of, load_items, load_manifest
from routecast.metrics import per_pixel_accuracy


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", required=True, help="dataset directory")
    ap.add_argument("--n-pairs", type=int, default=8)
    ap.add_argument("--max-steps", type=int, default=2000)
    ap.add_argument("--base-width", type=int, default=32)
    ap.add_argument("--target-acc", type=float, default=0.90)
    ap.add_argument("--eval-every", type=int, default=100)
    ap.add_argument("--tau", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None, help="optional checkpoint path")
    args = ap.parse_args(argv)

    manifest = load_manifest(args.data)
    layout = layout_of(manifest)
    items = load_items(args.data, manifest)[: args.n_pairs]
    if len(items) < args.n_pairs:
        print(f"error: dataset has only {len(items)} usable items", file=sys.stderr)
        return 1
    pairs = [(it["x"], it["truth"]) for it in items]
    utils = [it["util"] for it in items]

    w = pairs[0][0].shape[1]
    g_cfg, d_cfg = default_configs(w=w, base_width=args.base_width)[:2]
    epochs = -(-args.max_steps // len(pairs))  # ceil division
    t_cfg = TrainConfig(epochs=epochs, seed=args.seed)

    t0 = time.perf_counter()
    state = {"steps": 0, "hit": None}

    def on_step(step, losses):
        state["steps"] = step

    def on_epoch(epoch, loop):
        if state["steps"] == 0 or state["steps"] % args.eval_every >= len(pairs):
            return
        ckpt = loop.checkpoint()
        predict = Predictor(ckpt)
        preds = [predict(x) for x, _ in pairs]
        rep = per_pixel_accuracy(preds, utils, layout, tau=args.tau)
        dt = time.perf_counter() - t0
        print(f"step {state['steps']:5d}  acc {rep.per_pixel_acc:.4f}  {dt:7.1f}s", flush=True)
        if rep.per_pixel_acc >= args.target_acc and state["hit"] is None:
            state["hit"] = state["steps"]
            loop.stop = True

    ckpt = train(pairs, g_cfg, d_cfg, t_cfg, TrainCallbacks(on_step=on_step, on_epoch=on_epoch))

    predict = Predictor(ckpt)
    preds = [predict(x) for x, _ in pairs]
    rep = per_pixel_accuracy(preds, utils, layout, tau=args.tau)
    dt = time.perf_counter() - t0
    hit = state["hit"] if state["hit"] is not None else "never"
    print(f"final acc {rep.per_pixel_acc:.4f} (baseline {rep.baseline_acc:.4f}) "
          f"target hit at step {hit}, {dt:.1f}s total")
    if args.out:
        ckpt.save(Path(args.out))
        print(f"wrote {args.out}")
    return 0 if rep.per_pixel_acc >= args.target_acc else 1


if __name__ == "__main__":
    sys.exit(main())
