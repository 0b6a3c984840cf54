"""Command-line front end: dataset generation through congestion forecasting.

Subcommands: gen-arch, gen-netlist, dataset, train, fine-tune, infer, eval,
explore, watch, ablate. Every command is seed-deterministic: identical
inputs and seeds reproduce byte-identical artifacts. Exit codes: 0 success,
2 validation error, 3 IO error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import dataset as ds
from .arch import Floorplan, canonical_json, make_floorplan
from .cgan import (
    DiscriminatorConfig,
    GeneratorConfig,
    ModelCheckpoint,
    Predictor,
    TrainCallbacks,
    TrainConfig,
    default_configs,
    fine_tune,
    train,
)
from .errors import ArtifactIOError, ValidationError
from .metrics import (
    ExploreObjective,
    REGION_NAMES,
    ablation_compare,
    explore,
    per_pixel_accuracy,
    save_report,
    write_loss_csv,
)
from .netlist import SyntheticParams, generate_synthetic, load_netlist
from .placer import ALGORITHMS, AnnealSchedule, anneal
from .raster import ImagePlane, RasterLayout, load_png, render_connectivity, render_placement, save_png, stack_input, to_grayscale
from .router import CONGESTION_MODES, RouteConfig

CKPT_SUFFIX = ".rckp"
ABLATION_VARIANTS = (
    ("all_l1", "all", True),
    ("no_l1", "all", False),
    ("single_skip", "single", True),
)


def _ints(text: str) -> list[int]:
    """'0:25' -> 0..24; '1,5,9' -> [1, 5, 9]."""
    text = text.strip()
    if ":" in text:
        lo, hi = text.split(":", 1)
        return list(range(int(lo), int(hi)))
    return [int(t) for t in text.split(",") if t.strip()]


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _strs(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _opt(args, name: str, fallback=None):
    val = getattr(args, name, None)
    return fallback if val is None else val


def _require_out(args) -> Path:
    out = _opt(args, "out")
    if out is None:
        raise ValidationError("--out is required for this command")
    return Path(out)


_BOOL_WORDS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _train_config(args, base: TrainConfig | None = None) -> TrainConfig:
    """TrainConfig from defaults, then --config file, then explicit flags."""
    values = dataclasses.asdict(base) if base is not None else dataclasses.asdict(TrainConfig())
    ftypes = {f.name: f.type for f in dataclasses.fields(TrainConfig)}
    cfg_path = _opt(args, "config")
    if cfg_path:
        p = Path(cfg_path)
        if not p.exists():
            raise ArtifactIOError(f"config file not found: {p}")
        for ln, raw in enumerate(p.read_text().splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"{p}:{ln}: expected key=value, got {raw!r}")
            key, val = (t.strip() for t in line.split("=", 1))
            if key not in values:
                raise ValidationError(f"{p}:{ln}: unknown TrainConfig field {key!r}")
            kind = ftypes[key]
            if kind == "bool":
                if val.lower() not in _BOOL_WORDS:
                    raise ValidationError(f"{p}:{ln}: {key} expects a boolean, got {val!r}")
                values[key] = _BOOL_WORDS[val.lower()]
            elif kind == "int":
                values[key] = int(val)
            elif kind == "float":
                values[key] = float(val)
            else:
                values[key] = val
    for key in ("epochs", "lr", "beta1", "beta2", "eps", "l1_weight", "connect_scale", "seed", "batch"):
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if getattr(args, "no_l1", False):
        values["use_l1"] = False
    if getattr(args, "grayscale", False):
        values["grayscale"] = True
    return TrainConfig(**values)


# -- subcommand handlers ---------------------------------------------------


def cmd_gen_arch(args) -> int:
    def col(v):
        return None if v is not None and v < 0 else v

    fp = make_floorplan(
        cols=args.cols,
        rows=args.rows,
        mem_col=col(args.mem_col),
        mult_col=col(args.mult_col),
        channel_capacity=args.channel_capacity,
        io_ports_per_pad=args.io_ports_per_pad,
    )
    out = _require_out(args)
    fp.save_json(out)
    print(f"wrote {out}")
    return 0


def cmd_gen_netlist(args) -> int:
    params = SyntheticParams(
        n_clb=args.n_clb,
        n_inpad=args.n_in,
        n_outpad=args.n_out,
        n_mem=args.n_mem,
        n_mult=args.n_mult,
        avg_fanout=args.avg_fanout,
        rent_exponent=args.rent,
    )
    net = generate_synthetic(params, seed=_opt(args, "seed", 0))
    if args.arch:
        fp = Floorplan.load_json(args.arch)
        for kind, need in net.counts().items():
            have = fp.capacity_for_block_kind(kind)
            if need > have:
                raise ValidationError(f"netlist needs {need} {kind} sites but floorplan offers {have}")
    out = _require_out(args)
    net.save(out)
    counts = " ".join(f"{k}={v}" for k, v in sorted(net.counts().items()))
    print(f"wrote {out} ({counts}, nets={net.n_nets})")
    return 0


def cmd_dataset(args) -> int:
    fp = Floorplan.load_json(args.arch)
    net = load_netlist(args.netlist)
    cfg = RouteConfig(
        max_iters=args.route_iters,
        pres_fac_init=args.pres_fac_init,
        pres_fac_mult=args.pres_fac_mult,
        hist_fac=args.hist_fac,
    )
    manifest = ds.build_dataset(
        fp,
        net,
        _require_out(args),
        seeds=_ints(args.seeds),
        alpha_ts=_floats(args.alpha_ts),
        inner_nums=_floats(args.inner_nums),
        algorithms=_strs(args.algorithms),
        w=_opt(args, "w", 256),
        px_per_tile=args.px_per_tile,
        channel_px=args.channel_px,
        route_cfg=cfg,
        edge_intensity=args.edge_intensity,
    )
    n = len(manifest["items"])
    n_over = sum(1 for it in manifest["items"] if it["overflow"])
    print(f"dataset at {_require_out(args)}: {n} items, {n_over} overflowed")
    return 0


def _model_configs(args, items) -> tuple[GeneratorConfig, DiscriminatorConfig, int]:
    w = items[0]["x"].shape[-1]
    in_ch = items[0]["x"].shape[0]
    g_cfg, d_cfg = default_configs(
        w=w,
        grayscale=in_ch == 2,
        base_width=args.base_width if args.base_width > 0 else None,
        skip_mode=args.skip_mode,
    )
    if args.depth > 0:
        g_cfg = dataclasses.replace(g_cfg, depth=args.depth)
    return g_cfg, d_cfg, w


def _loss_csv_path(args, ckpt_path: Path) -> Path:
    if getattr(args, "loss_csv", None):
        return Path(args.loss_csv)
    return ckpt_path.with_suffix(ckpt_path.suffix + ".loss.csv")


def _run_training(args, t_cfg, items, ckpt_path: Path, base_ckpt: ModelCheckpoint | None) -> None:
    pairs = ds.training_pairs(items)
    rows: list[tuple[int, dict]] = []
    every = getattr(args, "checkpoint_every", 0) or 0

    def on_step(step, losses):
        rows.append((step, losses))

    def on_epoch(epoch, loop):
        if every > 0 and epoch % every == 0:
            snap = ckpt_path.with_suffix(f".ep{epoch:04d}{CKPT_SUFFIX}")
            loop.checkpoint().save(snap)

    callbacks = TrainCallbacks(on_step=on_step, on_epoch=on_epoch)
    if base_ckpt is None:
        g_cfg, d_cfg, _ = _model_configs(args, items)
        manifest_hash = getattr(args, "_manifest_hash", "")
        ckpt = train(pairs, g_cfg, d_cfg, t_cfg, callbacks, manifest_hash=manifest_hash)
    else:
        ckpt = fine_tune(base_ckpt, pairs, t_cfg, callbacks)
    ckpt.save(ckpt_path)
    loss_path = _loss_csv_path(args, ckpt_path)
    write_loss_csv(loss_path, rows)
    if rows:
        last = rows[-1][1]
        print(f"final step {rows[-1][0]}: d_loss={last['d_loss']:.4f} g_adv={last['g_adv_loss']:.4f} g_l1={last['g_l1_loss']:.4f}")
    print(f"wrote {ckpt_path}")
    print(f"wrote {loss_path}")


def cmd_train(args) -> int:
    t_cfg = _train_config(args)
    manifest = ds.load_manifest(args.data)
    items = ds.load_items(
        args.data,
        manifest,
        split=args.split,
        include_overflow=args.include_overflow,
        grayscale=t_cfg.grayscale,
        connect_scale=t_cfg.connect_scale,
    )
    args._manifest_hash = manifest["netlist_hash"]
    _run_training(args, t_cfg, items, _require_out(args), base_ckpt=None)
    return 0


def cmd_fine_tune(args) -> int:
    ckpt = ModelCheckpoint.load(args.checkpoint)
    t_cfg = _train_config(args, base=dataclasses.replace(ckpt.t_cfg, epochs=10))
    manifest = ds.load_manifest(args.data)
    items = ds.load_items(
        args.data,
        manifest,
        split=args.split,
        include_overflow=args.include_overflow,
        grayscale=t_cfg.grayscale,
        connect_scale=t_cfg.connect_scale,
    )
    if args.ids:
        wanted = set(_strs(args.ids))
        items = [it for it in items if it["id"] in wanted]
        missing = wanted - {it["id"] for it in items}
        if missing:
            raise ValidationError(f"ids not in dataset split: {sorted(missing)}")
    elif args.k > 0:
        items = items[: args.k]
    if not items:
        raise ValidationError("no items selected for fine-tuning")
    _run_training(args, t_cfg, items, _require_out(args), base_ckpt=ckpt)
    return 0


def _item_input(entry, data_dir: Path, ckpt: ModelCheckpoint) -> np.ndarray:
    img_place = load_png(data_dir / entry["images"]["place"])
    img_connect = load_png(data_dir / entry["images"]["connect"])
    place_in = to_grayscale(img_place) if ckpt.t_cfg.grayscale else img_place
    return stack_input(place_in, img_connect, ckpt.t_cfg.connect_scale).arr.transpose(2, 0, 1)


def cmd_infer(args) -> int:
    ckpt = ModelCheckpoint.load(args.checkpoint)
    predict = Predictor(ckpt)
    if args.place_png:
        if not args.connect_png:
            raise ValidationError("--connect-png is required with --place-png")
        img_place = load_png(args.place_png)
        img_connect = load_png(args.connect_png)
        place_in = to_grayscale(img_place) if ckpt.t_cfg.grayscale else img_place
        x = stack_input(place_in, img_connect, ckpt.t_cfg.connect_scale).arr.transpose(2, 0, 1)
        default_name = "forecast.png"
    else:
        if not args.data or not args.item:
            raise ValidationError("provide --data and --item, or --place-png/--connect-png")
        manifest = ds.load_manifest(args.data)
        by_id = {e["id"]: e for e in manifest["items"]}
        item_id = args.item
        if item_id not in by_id and item_id.isdigit():
            item_id = f"{int(item_id):04d}"
        if item_id not in by_id:
            raise ValidationError(f"item {args.item!r} not in manifest")
        x = _item_input(by_id[item_id], Path(args.data), ckpt)
        default_name = f"forecast_{item_id}.png"
    out = Path(_opt(args, "out", default_name))
    save_png(predict(x), out)
    print(f"wrote {out}")
    return 0


def cmd_eval(args) -> int:
    ckpt = ModelCheckpoint.load(args.checkpoint)
    manifest = ds.load_manifest(args.data)
    items = ds.load_items(
        args.data,
        manifest,
        split=args.split,
        include_overflow=args.include_overflow,
        grayscale=ckpt.t_cfg.grayscale,
        connect_scale=ckpt.t_cfg.connect_scale,
    )
    layout = ds.layout_of(manifest)
    predict = Predictor(ckpt)
    preds = [predict(it["x"]) for it in items]
    report = per_pixel_accuracy(
        preds,
        [it["util"] for it in items],
        layout,
        tau=args.tau,
        ids=[it["id"] for it in items],
    )
    out = _opt(args, "out")
    if out:
        save_report(report, Path(out))
        print(f"wrote {out}")
    print(
        f"per_pixel_acc={report.per_pixel_acc:.4f} baseline={report.baseline_acc:.4f} "
        f"tau={report.tolerance} segments={report.n_segments} items={len(items)}"
    )
    return 0


def cmd_explore(args) -> int:
    ckpt = ModelCheckpoint.load(args.checkpoint)
    manifest = ds.load_manifest(args.data)
    items = ds.load_items(
        args.data,
        manifest,
        split=args.split,
        include_overflow=True,
        grayscale=ckpt.t_cfg.grayscale,
        connect_scale=ckpt.t_cfg.connect_scale,
    )
    layout = ds.layout_of(manifest)
    predict = Predictor(ckpt)
    objective = ExploreObjective(
        mode=args.mode,
        region=None if args.region in (None, "", "none", "all") else args.region,
        direction=args.direction,
    )
    ranked = explore(((it["id"], predict(it["x"])) for it in items), layout, objective)
    out = _opt(args, "out")
    if out:
        lines = ["rank,id,score"] + [f"{i},{item_id},{score:.6f}" for i, (item_id, score) in enumerate(ranked)]
        Path(out).write_text("\n".join(lines) + "\n")
        print(f"wrote {out}")
    top = ranked if args.k <= 0 else ranked[: args.k]
    for i, (item_id, score) in enumerate(top):
        print(f"{i:3d} {item_id} {score:.6f}")
    return 0


def cmd_watch(args) -> int:
    if args.every < 1:
        raise ValidationError(f"--every must be >= 1, got {args.every}")
    fp = Floorplan.load_json(args.arch)
    net = load_netlist(args.netlist)
    ckpt = ModelCheckpoint.load(args.checkpoint)
    layout = RasterLayout.for_floorplan(fp, w=ckpt.w, px_per_tile=args.px_per_tile, channel_px=args.channel_px)
    predict = Predictor(ckpt)
    out = _require_out(args)
    out.mkdir(parents=True, exist_ok=True)
    sched = AnnealSchedule(
        seed=_opt(args, "seed", 0),
        alpha_t=args.alpha_t,
        inner_num=args.inner_num,
        algorithm=args.algorithm,
    )
    res = anneal(net, fp, sched, snapshot_every=args.every)
    for i, placement in enumerate(res.snapshots):
        img_place = render_placement(fp, placement, layout)
        img_connect = render_connectivity(net, placement, layout, args.edge_intensity)
        place_in = to_grayscale(img_place) if ckpt.t_cfg.grayscale else img_place
        x = stack_input(place_in, img_connect, ckpt.t_cfg.connect_scale).arr.transpose(2, 0, 1)
        forecast = predict(x)
        frame = np.concatenate([img_place.arr, forecast.arr], axis=1)
        save_png(ImagePlane(frame), out / f"frame_{i:05d}.png")
    print(f"wrote {len(res.snapshots)} frames to {out} (cost {res.initial_cost:.1f} -> {res.final_cost:.1f})")
    return 0


def run_ablation(
    data_dir,
    out_dir,
    seeds,
    base_cfg: TrainConfig,
    base_width: int | None = None,
    tau: float = 0.1,
    include_overflow: bool = False,
    progress=print,
):
    """Train every (variant, seed) pair and compare holdout L1; returns (report, medians)."""
    manifest = ds.load_manifest(data_dir)
    layout = ds.layout_of(manifest)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    train_items = ds.load_items(
        data_dir, manifest, split="train",
        include_overflow=include_overflow,
        grayscale=base_cfg.grayscale, connect_scale=base_cfg.connect_scale,
    )
    variants = []
    for name, skip_mode, use_l1 in ABLATION_VARIANTS:
        for seed in seeds:
            t_cfg = dataclasses.replace(base_cfg, use_l1=use_l1, seed=seed)
            g_cfg, d_cfg = default_configs(
                w=train_items[0]["x"].shape[-1],
                grayscale=t_cfg.grayscale,
                base_width=base_width,
                skip_mode=skip_mode,
            )
            rows: list[tuple[int, dict]] = []
            ckpt = train(
                ds.training_pairs(train_items), g_cfg, d_cfg, t_cfg,
                TrainCallbacks(on_step=lambda s, l: rows.append((s, l))),
                manifest_hash=manifest["netlist_hash"],
            )
            tag = f"{name}_s{seed}"
            ckpt.save(out / f"{tag}{CKPT_SUFFIX}")
            loss_path = out / f"loss_{tag}.csv"
            write_loss_csv(loss_path, rows)
            variants.append({"name": tag, "checkpoint": ckpt, "loss_csv": loss_path})
            if progress:
                progress(f"trained {tag}: {len(rows)} steps")
    hold_items = ds.load_items(
        data_dir, manifest, split="holdout",
        include_overflow=include_overflow,
        grayscale=base_cfg.grayscale, connect_scale=base_cfg.connect_scale,
    )
    report = ablation_compare(variants, ds.eval_tuples(hold_items), layout, tau=tau)
    (out / "ablation.csv").write_text(report.to_csv())
    save_report(report, out / "ablation.json")
    medians = {}
    for name, _, _ in ABLATION_VARIANTS:
        vals = [r.val_l1 for r in report.rows if r.name.rsplit("_s", 1)[0] == name]
        medians[name] = float(np.median(vals))
    (out / "medians.json").write_text(canonical_json(medians) + "\n")
    return report, medians


def cmd_ablate(args) -> int:
    out = _require_out(args)
    report, medians = run_ablation(
        args.data,
        out,
        _ints(args.seeds),
        _train_config(args),
        base_width=args.base_width if args.base_width > 0 else None,
        tau=args.tau,
        include_overflow=args.include_overflow,
    )
    for row in report.rows:
        print(f"{row.name}: acc={row.per_pixel_acc:.4f} val_l1={row.val_l1:.4f}")
    print(f"medians: {medians}")
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="routecast", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=None, help="seed (command-specific default if omitted)")
    parser.add_argument("--out", default=None, help="output file or directory")
    parser.add_argument("--w", type=int, default=None, help="image width/height in pixels")
    parser.add_argument("--threads", type=int, default=None, help="reserved; runs are single-threaded")
    common = argparse.ArgumentParser(add_help=False)
    for flag, kw in (
        ("--seed", {"type": int}),
        ("--out", {}),
        ("--w", {"type": int}),
        ("--threads", {"type": int}),
    ):
        common.add_argument(flag, default=argparse.SUPPRESS, **kw)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-arch", parents=[common], help="write a floorplan JSON")
    p.add_argument("--cols", type=int, default=8)
    p.add_argument("--rows", type=int, default=8)
    p.add_argument("--mem-col", type=int, default=2, help="interior column of MEM tiles; -1 for none")
    p.add_argument("--mult-col", type=int, default=5, help="interior column of MULT tiles; -1 for none")
    p.add_argument("--channel-capacity", type=int, default=16)
    p.add_argument("--io-ports-per-pad", type=int, default=8)
    p.set_defaults(func=cmd_gen_arch)

    p = sub.add_parser("gen-netlist", parents=[common], help="generate a synthetic netlist")
    p.add_argument("--arch", default=None, help="optional floorplan JSON to check capacity against")
    p.add_argument("--n-clb", type=int, required=True)
    p.add_argument("--n-in", type=int, default=4)
    p.add_argument("--n-out", type=int, default=4)
    p.add_argument("--n-mem", type=int, default=0)
    p.add_argument("--n-mult", type=int, default=0)
    p.add_argument("--avg-fanout", type=float, default=3.0)
    p.add_argument("--rent", type=float, default=0.7)
    p.set_defaults(func=cmd_gen_netlist)

    p = sub.add_parser("dataset", parents=[common], help="sweep, route, rasterize, manifest")
    p.add_argument("--arch", required=True)
    p.add_argument("--netlist", required=True)
    p.add_argument("--seeds", default="0:25", help="'lo:hi' range or comma list")
    p.add_argument("--alpha-ts", default="0.9")
    p.add_argument("--inner-nums", default="10")
    p.add_argument("--algorithms", default="anneal", help=f"comma list from {ALGORITHMS}")
    p.add_argument("--px-per-tile", type=int, default=4)
    p.add_argument("--channel-px", type=int, default=2)
    p.add_argument("--route-iters", type=int, default=30)
    p.add_argument("--pres-fac-init", type=float, default=0.5)
    p.add_argument("--pres-fac-mult", type=float, default=1.6)
    p.add_argument("--hist-fac", type=float, default=0.2)
    p.add_argument("--edge-intensity", type=float, default=0.25)
    p.set_defaults(func=cmd_dataset)

    def add_train_flags(p, with_model=True):
        p.add_argument("--data", required=True, help="dataset directory")
        p.add_argument("--epochs", type=int, default=None)
        p.add_argument("--batch", type=int, default=None)
        p.add_argument("--lr", type=float, default=None)
        p.add_argument("--beta1", type=float, default=None)
        p.add_argument("--beta2", type=float, default=None)
        p.add_argument("--eps", type=float, default=None)
        p.add_argument("--l1-weight", dest="l1_weight", type=float, default=None)
        p.add_argument("--connect-scale", dest="connect_scale", type=float, default=None)
        p.add_argument("--no-l1", dest="no_l1", action="store_true")
        p.add_argument("--grayscale", action="store_true")
        p.add_argument("--config", default=None, help="key=value file of TrainConfig overrides")
        p.add_argument("--include-overflow", action="store_true")
        p.add_argument("--loss-csv", default=None)
        p.add_argument("--checkpoint-every", type=int, default=0, help="save a checkpoint every N epochs")
        if with_model:
            p.add_argument("--base-width", type=int, default=0, help="0 = auto from image size")
            p.add_argument("--depth", type=int, default=0, help="0 = auto from image size")
            p.add_argument("--skip-mode", default="all", choices=("all", "single", "none"))

    p = sub.add_parser("train", parents=[common], help="train a forecaster on a dataset")
    add_train_flags(p)
    p.add_argument("--split", default="train", choices=ds.SPLITS)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("fine-tune", parents=[common], help="continue training a checkpoint on selected pairs")
    add_train_flags(p, with_model=False)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--split", default="train", choices=ds.SPLITS)
    p.add_argument("--ids", default=None, help="comma list of item ids")
    p.add_argument("--k", type=int, default=0, help="use the first K items of the split")
    p.set_defaults(func=cmd_fine_tune)

    p = sub.add_parser("infer", parents=[common], help="forecast congestion for one placement")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", default=None)
    p.add_argument("--item", default=None)
    p.add_argument("--place-png", default=None)
    p.add_argument("--connect-png", default=None)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("eval", parents=[common], help="per-pixel accuracy on a dataset split")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--split", default="holdout", choices=ds.SPLITS)
    p.add_argument("--tau", type=float, default=0.1)
    p.add_argument("--include-overflow", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("explore", parents=[common], help="rank placements by forecast congestion")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--split", default="all", choices=ds.SPLITS)
    p.add_argument("--mode", default="mean", choices=CONGESTION_MODES)
    p.add_argument("--region", default=None, help=f"one of {REGION_NAMES} or 'all'")
    p.add_argument("--direction", default="min", choices=("min", "max"))
    p.add_argument("--k", type=int, default=10, help="print the top K; <=0 prints all")
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("watch", parents=[common], help="forecast frames along an annealing run")
    p.add_argument("--arch", required=True)
    p.add_argument("--netlist", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--every", type=int, default=200, help="snapshot every N accepted moves")
    p.add_argument("--alpha-t", dest="alpha_t", type=float, default=0.9)
    p.add_argument("--inner-num", dest="inner_num", type=float, default=10.0)
    p.add_argument("--algorithm", default="anneal", choices=ALGORITHMS)
    p.add_argument("--px-per-tile", type=int, default=4)
    p.add_argument("--channel-px", type=int, default=2)
    p.add_argument("--edge-intensity", type=float, default=0.25)
    p.set_defaults(func=cmd_watch)

    p = sub.add_parser("ablate", parents=[common], help="train skip/L1 variants and compare on holdout")
    add_train_flags(p)
    p.add_argument("--seeds", default="0,1,2")
    p.add_argument("--tau", type=float, default=0.1)
    p.set_defaults(func=cmd_ablate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ArtifactIOError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
