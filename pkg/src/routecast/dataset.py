"""On-disk dataset layout: placements swept, routed, rasterized, manifested.

A dataset directory holds one floorplan image (fl.png), the netlist it was
built from (netlist.txt), and per item i: place_%04d.json, pl/cn/rt PNGs,
and util_%04d.csv, all indexed by manifest.json. The manifest records
content hashes for every file, so generation is resumable (items whose
files already verify are skipped) and loads fail loudly on corruption.

Training pairs are loaded back from the stored PNGs: x stacks the
placement image (RGB, or luma when grayscale) with the scaled
connectivity channel; the target is the congestion heat map image.
"""

from __future__ import annotations

import hashlib
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .arch import Floorplan, canonical_json
from .errors import ArtifactIOError, ValidationError
from .netlist import Netlist
from .placer import AnnealSchedule, anneal
from .raster import (
    DEFAULT_SCHEME,
    ColorScheme,
    RasterLayout,
    load_png,
    render_connectivity,
    render_floorplan,
    render_heatmap,
    render_placement,
    save_png,
    stack_input,
    to_grayscale,
)
from .router import ChannelUtilization, RouteConfig, route

MANIFEST_NAME = "manifest.json"
FLOOR_IMAGE = "fl.png"
NETLIST_FILE = "netlist.txt"
MANIFEST_FORMAT = 1
SPLITS = ("all", "train", "holdout")
_HOLDOUT_STRIDE = 5  # every 5th item is held out: a fixed 80/20 split


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _file_hash(path: Path) -> str:
    return _sha256(path.read_bytes())


def _item_names(idx: int) -> dict:
    return {
        "placement": f"place_{idx:04d}.json",
        "place_img": f"pl_{idx:04d}.png",
        "connect_img": f"cn_{idx:04d}.png",
        "route_img": f"rt_{idx:04d}.png",
        "util": f"util_{idx:04d}.csv",
    }


def _scheme_dict(scheme: ColorScheme) -> dict:
    return {k: list(getattr(scheme, k)) for k in ("white", "lightblue", "pink", "lightyellow", "black", "gradient_low", "gradient_high")}


def _item_verifies(out: Path, entry: dict) -> bool:
    for fname, want in entry["hashes"].items():
        p = out / fname
        if not p.exists() or _file_hash(p) != want:
            return False
    return True


def build_dataset(
    fp: Floorplan,
    netlist: Netlist,
    out_dir: str | Path,
    seeds,
    alpha_ts=(0.9,),
    inner_nums=(10.0,),
    algorithms=("anneal",),
    w: int = 256,
    px_per_tile: int = 4,
    channel_px: int = 2,
    route_cfg: RouteConfig | None = None,
    edge_intensity: float = 0.25,
    scheme: ColorScheme = DEFAULT_SCHEME,
    progress=None,
) -> dict:
    """Sweep placements, route each, rasterize, and write the manifest.

    Grid order is seeds x alpha_ts x inner_nums x algorithms. Items whose
    files already exist with matching hashes are not recomputed. Returns
    the manifest dict (also written to manifest.json).
    """
    seeds = list(seeds)
    alpha_ts = list(alpha_ts)
    inner_nums = list(inner_nums)
    algorithms = list(algorithms)
    for name, axis in (("seeds", seeds), ("alpha_ts", alpha_ts), ("inner_nums", inner_nums), ("algorithms", algorithms)):
        if not axis:
            raise ValidationError(f"empty sweep axis: {name}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    layout = RasterLayout.for_floorplan(fp, w=w, px_per_tile=px_per_tile, channel_px=channel_px)
    cfg = route_cfg if route_cfg is not None else RouteConfig()

    fp_blob = canonical_json(fp.to_dict()).encode()
    net_blob = netlist.serialize().encode()
    head = {
        "format": MANIFEST_FORMAT,
        "floorplan": fp.to_dict(),
        "floorplan_hash": _sha256(fp_blob),
        "netlist_hash": _sha256(net_blob),
        "layout": {"w": w, "px_per_tile": px_per_tile, "channel_px": channel_px},
        "edge_intensity": edge_intensity,
        "scheme": _scheme_dict(scheme),
        "route": asdict(cfg),
    }

    old_items: dict[str, dict] = {}
    mpath = out / MANIFEST_NAME
    if mpath.exists():
        import json

        try:
            old = json.loads(mpath.read_text())
        except json.JSONDecodeError as e:
            raise ArtifactIOError(f"existing manifest is corrupt: {e}") from e
        for key in ("floorplan_hash", "netlist_hash", "layout"):
            if old.get(key) != head[key]:
                raise ValidationError(f"existing dataset at {out} was built from different inputs ({key} differs)")
        for entry in old.get("items", []):
            old_items[canonical_json(entry["options"])] = entry

    net_path = out / NETLIST_FILE
    if not net_path.exists() or net_path.read_bytes() != net_blob:
        net_path.write_bytes(net_blob)
    floor_path = out / FLOOR_IMAGE
    save_png(render_floorplan(fp, layout, scheme), floor_path)

    items = []
    idx = 0
    for seed in seeds:
        for alpha_t in alpha_ts:
            for inner_num in inner_nums:
                for algorithm in algorithms:
                    options = {"seed": int(seed), "alpha_t": float(alpha_t), "inner_num": float(inner_num), "algorithm": algorithm}
                    names = _item_names(idx)
                    prior = old_items.get(canonical_json(options))
                    if prior is not None and prior["id"] == f"{idx:04d}" and _item_verifies(out, prior):
                        items.append(prior)
                        idx += 1
                        continue
                    sched = AnnealSchedule(seed=int(seed), alpha_t=float(alpha_t), inner_num=float(inner_num), algorithm=algorithm)
                    res = anneal(netlist, fp, sched)
                    placement = res.placement
                    routing = route(netlist, placement, fp, cfg)
                    util = routing.utilization()

                    placement.save_json(out / names["placement"])
                    img_place = render_placement(fp, placement, layout, scheme)
                    save_png(img_place, out / names["place_img"])
                    save_png(render_connectivity(netlist, placement, layout, edge_intensity), out / names["connect_img"])
                    save_png(render_heatmap(util, img_place, layout, scheme), out / names["route_img"])
                    util.save_csv(out / names["util"])

                    files = [names["placement"], names["place_img"], names["connect_img"], names["route_img"], names["util"]]
                    entry = {
                        "id": f"{idx:04d}",
                        "options": options,
                        "placement": names["placement"],
                        "images": {"place": names["place_img"], "connect": names["connect_img"], "route": names["route_img"]},
                        "util": names["util"],
                        "overflow": bool(routing.overflow),
                        "final_cost": res.final_cost,
                        "hashes": {f: _file_hash(out / f) for f in files},
                    }
                    items.append(entry)
                    if progress is not None:
                        progress(idx, entry)
                    idx += 1

    manifest = dict(head)
    manifest["files"] = {FLOOR_IMAGE: _file_hash(floor_path), NETLIST_FILE: _sha256(net_blob)}
    manifest["items"] = items
    mpath.write_text(canonical_json(manifest) + "\n")
    return manifest


def load_manifest(out_dir: str | Path, verify: bool = True) -> dict:
    """Read manifest.json, checking every referenced file's hash."""
    import json

    out = Path(out_dir)
    mpath = out / MANIFEST_NAME
    if not mpath.exists():
        raise ArtifactIOError(f"no manifest at {mpath}")
    try:
        manifest = json.loads(mpath.read_text())
    except json.JSONDecodeError as e:
        raise ArtifactIOError(f"corrupt manifest: {e}") from e
    if manifest.get("format") != MANIFEST_FORMAT:
        raise ArtifactIOError(f"unsupported manifest format {manifest.get('format')!r}")
    if verify:
        for fname, want in manifest.get("files", {}).items():
            p = out / fname
            if not p.exists():
                raise ArtifactIOError(f"manifest references missing file {fname}")
            if _file_hash(p) != want:
                raise ArtifactIOError(f"file {fname} does not match its manifest hash")
        for entry in manifest["items"]:
            for fname, want in entry["hashes"].items():
                p = out / fname
                if not p.exists():
                    raise ArtifactIOError(f"item {entry['id']}: missing file {fname}")
                if _file_hash(p) != want:
                    raise ArtifactIOError(f"item {entry['id']}: file {fname} does not match its manifest hash")
    return manifest


def layout_of(manifest: dict) -> RasterLayout:
    fp = Floorplan.from_dict(manifest["floorplan"])
    lay = manifest["layout"]
    return RasterLayout.for_floorplan(fp, w=lay["w"], px_per_tile=lay["px_per_tile"], channel_px=lay["channel_px"])


def split_indices(n_items: int, split: str) -> list[int]:
    if split not in SPLITS:
        raise ValidationError(f"split must be one of {SPLITS}, got {split!r}")
    if split == "all":
        return list(range(n_items))
    held = set(range(_HOLDOUT_STRIDE - 1, n_items, _HOLDOUT_STRIDE))
    if split == "holdout":
        return sorted(held)
    return [i for i in range(n_items) if i not in held]


def load_items(
    out_dir: str | Path,
    manifest: dict | None = None,
    split: str = "all",
    include_overflow: bool = False,
    grayscale: bool = False,
    connect_scale: float = 0.1,
) -> list[dict]:
    """Materialize training/eval items from a dataset directory.

    Each item: {id, x (C,H,W float32), truth (3,H,W float32), truth_img,
    util, overflow, options}. Overflowed items are dropped unless opted in.
    """
    out = Path(out_dir)
    if manifest is None:
        manifest = load_manifest(out)
    entries = manifest["items"]
    picked = [entries[i] for i in split_indices(len(entries), split)]
    items = []
    for entry in picked:
        if entry["overflow"] and not include_overflow:
            continue
        img_place = load_png(out / entry["images"]["place"])
        img_connect = load_png(out / entry["images"]["connect"])
        truth_img = load_png(out / entry["images"]["route"])
        util = ChannelUtilization.load_csv(out / entry["util"])
        place_in = to_grayscale(img_place) if grayscale else img_place
        x = stack_input(place_in, img_connect, connect_scale).arr.transpose(2, 0, 1)
        items.append(
            {
                "id": entry["id"],
                "x": np.ascontiguousarray(x, dtype=np.float32),
                "truth": np.ascontiguousarray(truth_img.arr.transpose(2, 0, 1), dtype=np.float32),
                "truth_img": truth_img,
                "util": util,
                "overflow": entry["overflow"],
                "options": entry["options"],
            }
        )
    if not items:
        raise ValidationError(f"no usable items in {out} for split {split!r}")
    return items


def training_pairs(items: list[dict]) -> list[tuple[np.ndarray, np.ndarray]]:
    return [(it["x"], it["truth"]) for it in items]


def eval_tuples(items: list[dict]) -> list[tuple[str, np.ndarray, np.ndarray, ChannelUtilization]]:
    return [(it["id"], it["x"], it["truth"], it["util"]) for it in items]
