"""Forecast quality metrics and the applications built on them.

Accuracy is defined on decoded channel utilization: a segment counts as
correct when the utilization read back from the predicted image is within
tau of ground truth. The all-zero baseline (predict no congestion
anywhere) is reported alongside, since sparse maps make it a strong
strawman. Ranking quality is top-k overlap against true min-congestion
placements; exploration ranks candidate placements by a scalar congestion
objective evaluated on forecasts.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .raster import DEFAULT_SCHEME, ColorScheme, ImagePlane, RasterLayout, decode_heatmap
from .router import CONGESTION_MODES, ChannelUtilization, congestion_score

REGION_NAMES = ("upper", "lower", "left", "right")
DIRECTIONS = ("min", "max")


@dataclass(frozen=True)
class AccuracyReport:
    per_pixel_acc: float
    baseline_acc: float
    tolerance: float
    n_segments: int
    n_channel_pixels: int
    per_image: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "per_pixel_acc": self.per_pixel_acc,
            "baseline_acc": self.baseline_acc,
            "tolerance": self.tolerance,
            "n_segments": self.n_segments,
            "n_channel_pixels": self.n_channel_pixels,
            "per_image": list(self.per_image),
        }


@dataclass(frozen=True)
class RankingReport:
    k: int
    selected: list
    true_topk: list
    overlap: float

    def to_dict(self) -> dict:
        return {"k": self.k, "selected": list(self.selected), "true_topk": list(self.true_topk), "overlap": self.overlap}


def per_pixel_accuracy(
    pred_img,
    truth_util,
    layout: RasterLayout,
    tau: float = 0.1,
    scheme: ColorScheme = DEFAULT_SCHEME,
    ids=None,
) -> AccuracyReport:
    """Segment-level accuracy of forecast images against true utilization.

    Accepts one (image, utilization) pair or parallel lists. Images are
    decoded back to per-segment utilization; a segment is correct when
    |u_pred - u_true| <= tau.
    """
    preds = list(pred_img) if isinstance(pred_img, (list, tuple)) else [pred_img]
    truths = list(truth_util) if isinstance(truth_util, (list, tuple)) else [truth_util]
    if len(preds) != len(truths):
        raise ValidationError(f"{len(preds)} predictions vs {len(truths)} ground truths")
    if not preds:
        raise ValidationError("per_pixel_accuracy needs at least one pair")
    if ids is None:
        ids = list(range(len(preds)))
    n_correct = 0
    n_base = 0
    n_total = 0
    per_image = []
    for item_id, img, util in zip(ids, preds, truths):
        if util.rows != layout.rows or util.cols != layout.cols:
            raise ValidationError(
                f"utilization is {util.rows}x{util.cols} but layout is {layout.rows}x{layout.cols}"
            )
        decoded = decode_heatmap(img, layout, scheme)
        tv = util.values()
        dv = decoded.values()
        ok = np.abs(dv - tv) <= tau
        base = tv <= tau
        per_image.append(
            {
                "id": item_id,
                "acc": float(ok.mean()),
                "baseline_acc": float(base.mean()),
                "n_segments": int(tv.size),
            }
        )
        n_correct += int(ok.sum())
        n_base += int(base.sum())
        n_total += int(tv.size)
    mask_px = int(layout.channel_mask().sum())
    return AccuracyReport(
        per_pixel_acc=n_correct / n_total,
        baseline_acc=n_base / n_total,
        tolerance=tau,
        n_segments=n_total,
        n_channel_pixels=mask_px * len(preds),
        per_image=per_image,
    )


def _topk_ids(scores: dict, k: int) -> list:
    # min-congestion first; ties broken by id ascending
    return [i for i, _ in sorted(scores.items(), key=lambda kv: (kv[1], kv[0]))[:k]]


def topk_overlap(predicted_scores: dict, true_scores: dict, k: int = 10) -> RankingReport:
    if set(predicted_scores) != set(true_scores):
        raise ValidationError("predicted and true score maps must cover the same candidates")
    if len(predicted_scores) < k:
        raise ValidationError(f"need at least {k} candidates, got {len(predicted_scores)}")
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    selected = _topk_ids(predicted_scores, k)
    true_topk = _topk_ids(true_scores, k)
    overlap = len(set(selected) & set(true_topk)) / k
    return RankingReport(k=k, selected=selected, true_topk=true_topk, overlap=overlap)


@dataclass(frozen=True)
class ExploreObjective:
    mode: str = "mean"
    region: object = None  # None, a name from REGION_NAMES, or a (c0, r0, c1, r1) rect
    direction: str = "min"

    def __post_init__(self):
        if self.mode not in CONGESTION_MODES:
            raise ValidationError(f"mode must be one of {CONGESTION_MODES}, got {self.mode!r}")
        if self.direction not in DIRECTIONS:
            raise ValidationError(f"direction must be 'min' or 'max', got {self.direction!r}")
        if self.region is not None and not isinstance(self.region, (str, tuple, list)):
            raise ValidationError(f"region must be None, a name, or a rect, got {type(self.region).__name__}")


def named_region(cols: int, rows: int, name: str) -> tuple[int, int, int, int]:
    """Rectangles for the standard objective regions.

    upper/lower are the row halves; left/right the outer ceil(n/3) columns.
    """
    if name == "upper":
        return (0, 0, cols, rows // 2)
    if name == "lower":
        return (0, rows - rows // 2, cols, rows)
    third = math.ceil(cols / 3)
    if name == "left":
        return (0, 0, third, rows)
    if name == "right":
        return (cols - third, 0, cols, rows)
    raise ValidationError(f"unknown region {name!r}; expected one of {REGION_NAMES}")


def explore(
    items,
    layout: RasterLayout,
    objective: ExploreObjective,
    scheme: ColorScheme = DEFAULT_SCHEME,
) -> list[tuple[object, float]]:
    """Rank candidate placements by a congestion objective on their forecasts.

    items: iterable of (id, forecast image). Returns (id, score) pairs,
    best first for the requested direction; ties broken by id.
    """
    items = list(items)
    if not items:
        raise ValidationError("explore needs at least one candidate")
    region = objective.region
    if isinstance(region, str):
        region = named_region(layout.cols, layout.rows, region)
    elif region is not None:
        region = tuple(int(v) for v in region)
    scored = []
    for item_id, img in items:
        util = decode_heatmap(img, layout, scheme)
        scored.append((item_id, float(congestion_score(util, objective.mode, region))))
    sign = 1.0 if objective.direction == "min" else -1.0
    scored.sort(key=lambda t: (sign * t[1], t[0]))
    return scored


# -- ablation reporting --------------------------------------------------------


@dataclass(frozen=True)
class AblationRow:
    name: str
    per_pixel_acc: float
    baseline_acc: float
    val_l1: float
    final_d_loss: float | None = None
    final_g_adv: float | None = None
    final_g_l1: float | None = None
    loss_csv: str | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "per_pixel_acc": self.per_pixel_acc,
            "baseline_acc": self.baseline_acc,
            "val_l1": self.val_l1,
            "final_d_loss": self.final_d_loss,
            "final_g_adv": self.final_g_adv,
            "final_g_l1": self.final_g_l1,
            "loss_csv": self.loss_csv,
        }


@dataclass(frozen=True)
class AblationReport:
    tolerance: float
    rows: list

    def to_dict(self) -> dict:
        return {"tolerance": self.tolerance, "rows": [r.to_dict() for r in self.rows]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "per_pixel_acc", "baseline_acc", "val_l1", "final_d_loss", "final_g_adv", "final_g_l1", "loss_csv"])
        for r in self.rows:
            w.writerow(
                [
                    r.name,
                    f"{r.per_pixel_acc:.6f}",
                    f"{r.baseline_acc:.6f}",
                    f"{r.val_l1:.6f}",
                    "" if r.final_d_loss is None else f"{r.final_d_loss:.6f}",
                    "" if r.final_g_adv is None else f"{r.final_g_adv:.6f}",
                    "" if r.final_g_l1 is None else f"{r.final_g_l1:.6f}",
                    r.loss_csv or "",
                ]
            )
        return buf.getvalue()


def write_loss_csv(path, rows) -> None:
    """rows: iterable of (step, losses dict) as produced by the train loop."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "d_loss", "g_adv", "g_l1"])
        for step, losses in rows:
            w.writerow([step, f"{losses['d_loss']:.6f}", f"{losses['g_adv_loss']:.6f}", f"{losses['g_l1_loss']:.6f}"])


def read_loss_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        rdr = csv.DictReader(fh)
        out = []
        for rec in rdr:
            out.append(
                {
                    "step": int(rec["step"]),
                    "d_loss": float(rec["d_loss"]),
                    "g_adv": float(rec["g_adv"]),
                    "g_l1": float(rec["g_l1"]),
                }
            )
    if not out:
        raise ValidationError(f"loss curve {path} is empty")
    return out


def ablation_compare(
    variants,
    holdout,
    layout: RasterLayout,
    tau: float = 0.1,
    scheme: ColorScheme = DEFAULT_SCHEME,
) -> AblationReport:
    """Evaluate checkpoints side by side on a shared holdout set.

    variants: list of {"name", "checkpoint", optional "loss_csv"} where
    checkpoint is a ModelCheckpoint or a path. holdout: list of
    (id, x, truth_img, truth_util). Rows come back sorted by name.
    """
    from .cgan import ModelCheckpoint, Predictor

    if not holdout:
        raise ValidationError("ablation_compare needs a nonempty holdout set")
    rows = []
    for var in variants:
        ckpt = var["checkpoint"]
        if not isinstance(ckpt, ModelCheckpoint):
            ckpt = ModelCheckpoint.load(ckpt)
        predict = Predictor(ckpt)
        preds = []
        utils = []
        ids = []
        l1_sum = 0.0
        for item_id, x, truth_img, util in holdout:
            img = predict(x)
            preds.append(img)
            utils.append(util)
            ids.append(item_id)
            t = truth_img.arr.transpose(2, 0, 1) if isinstance(truth_img, ImagePlane) else np.asarray(truth_img, dtype=np.float32)
            p = img.arr.transpose(2, 0, 1)
            if t.shape != p.shape:
                raise ValidationError(f"item {item_id}: truth image {t.shape} vs prediction {p.shape}")
            l1_sum += float(np.abs(p - t).mean())
        acc = per_pixel_accuracy(preds, utils, layout, tau, scheme, ids=ids)
        final = {}
        if var.get("loss_csv"):
            final = read_loss_csv(var["loss_csv"])[-1]
        rows.append(
            AblationRow(
                name=var["name"],
                per_pixel_acc=acc.per_pixel_acc,
                baseline_acc=acc.baseline_acc,
                val_l1=l1_sum / len(holdout),
                final_d_loss=final.get("d_loss"),
                final_g_adv=final.get("g_adv"),
                final_g_l1=final.get("g_l1"),
                loss_csv=str(var["loss_csv"]) if var.get("loss_csv") else None,
            )
        )
    rows.sort(key=lambda r: r.name)
    return AblationReport(tolerance=tau, rows=rows)


def save_report(report, path) -> None:
    from .arch import canonical_json

    Path(path).write_text(canonical_json(report.to_dict()) + "\n")
