"""Image features: floorplan, placement, connectivity, and congestion maps.

All four feature images share one pixel geometry (RasterLayout): tile rects
of px_per_tile pixels separated by channel strips of channel_px pixels,
wrapped in a 1-px black outline around the pad ring, centered on a white
w x w canvas. The congestion map recolors channel-strip pixels only, which
is what makes the input/output pair structurally aligned.

Numeric convention: float arrays in [0,1], shape (H, W, C). PNG files are
8-bit; training consumes the float pipeline directly.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .arch import CLB, MEM, MULT, Floorplan
from .errors import ArtifactIOError, ValidationError
from .netlist import Netlist
from .placer import Placement
from .router import ChannelUtilization


@dataclass(frozen=True)
class ColorScheme:
    white: tuple[float, float, float] = (1.0, 1.0, 1.0)
    lightblue: tuple[float, float, float] = (0.678, 0.847, 0.902)
    pink: tuple[float, float, float] = (1.0, 0.753, 0.796)
    lightyellow: tuple[float, float, float] = (1.0, 1.0, 0.878)
    black: tuple[float, float, float] = (0.0, 0.0, 0.0)
    gradient_low: tuple[float, float, float] = (1.0, 1.0, 0.0)  # yellow
    gradient_high: tuple[float, float, float] = (0.502, 0.0, 0.502)  # purple

    def __post_init__(self):
        for name in ("white", "lightblue", "pink", "lightyellow", "black", "gradient_low", "gradient_high"):
            c = getattr(self, name)
            if len(c) != 3 or any(not (0.0 <= v <= 1.0) for v in c):
                raise ValidationError(f"{name} must be an RGB triple in [0,1], got {c}")
        flats = [self.white, self.lightblue, self.pink, self.lightyellow, self.black]
        for i in range(len(flats)):
            for j in range(i + 1, len(flats)):
                if float(np.linalg.norm(np.subtract(flats[i], flats[j]))) < 1e-6:
                    raise ValidationError(f"flat colors must be distinct, got {flats[i]} twice")
        lo = np.array(self.gradient_low)
        d = np.array(self.gradient_high) - lo
        if float(np.dot(d, d)) < 1e-6:
            raise ValidationError("gradient endpoints must be distinct")
        # the decoder separates unused (white) strips from gradient pixels by
        # nearest color, so white must sit well off the gradient line
        t = float(np.clip(np.dot(np.array(self.white) - lo, d) / np.dot(d, d), 0.0, 1.0))
        gap = float(np.linalg.norm(np.array(self.white) - (lo + t * d)))
        if gap < 0.2:
            raise ValidationError(f"white is only {gap:.3f} from the gradient line; decoding would be ambiguous")

    def gradient(self, t: float) -> np.ndarray:
        t = float(np.clip(t, 0.0, 1.0))
        lo = np.array(self.gradient_low)
        hi = np.array(self.gradient_high)
        return lo + t * (hi - lo)


DEFAULT_SCHEME = ColorScheme()


@dataclass
class ImagePlane:
    arr: np.ndarray  # (H, W, C) float32 in [0,1]

    def __post_init__(self):
        a = np.asarray(self.arr, dtype=np.float32)
        # 2 channels only ever appear as a grayscale model-input stack
        if a.ndim != 3 or a.shape[2] not in (1, 2, 3, 4):
            raise ValidationError(f"image must be (H, W, 1|2|3|4), got {a.shape}")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValidationError("image dims must be positive")
        if float(a.min()) < 0.0 or float(a.max()) > 1.0:
            raise ValidationError("pixel values must lie in [0, 1]")
        self.arr = a

    @property
    def height(self) -> int:
        return self.arr.shape[0]

    @property
    def width(self) -> int:
        return self.arr.shape[1]

    @property
    def channels(self) -> int:
        return self.arr.shape[2]

    def copy(self) -> "ImagePlane":
        return ImagePlane(self.arr.copy())


@dataclass(frozen=True)
class RasterLayout:
    """Pixel geometry for one floorplan at one resolution.

    Columns run: frame | pad | strip | tile | strip | ... | pad | frame,
    so full-grid tile tx starts at offset frame + tx*(px_per_tile +
    channel_px) and vertical channel vx sits right after tile column vx.
    """

    cols: int
    rows: int
    w: int = 256
    px_per_tile: int = 4
    channel_px: int = 2

    _FRAME = 1

    def __post_init__(self):
        if self.px_per_tile < 2:
            raise ValidationError(f"px_per_tile must be >= 2, got {self.px_per_tile}")
        if self.channel_px < 1:
            raise ValidationError(f"channel_px must be >= 1, got {self.channel_px}")
        if self.cols < 1 or self.rows < 1:
            raise ValidationError("layout needs at least a 1x1 interior")
        if self.content_w > self.w or self.content_h > self.w:
            raise ValidationError(
                f"layout overflow: content {self.content_w}x{self.content_h} exceeds {self.w}x{self.w}"
            )

    @classmethod
    def for_floorplan(cls, fp: Floorplan, w: int = 256, px_per_tile: int = 4, channel_px: int = 2) -> "RasterLayout":
        return cls(fp.cols, fp.rows, w, px_per_tile, channel_px)

    @property
    def content_w(self) -> int:
        return 2 * self._FRAME + (self.cols + 2) * self.px_per_tile + (self.cols + 1) * self.channel_px

    @property
    def content_h(self) -> int:
        return 2 * self._FRAME + (self.rows + 2) * self.px_per_tile + (self.rows + 1) * self.channel_px

    @property
    def ox(self) -> int:
        return (self.w - self.content_w) // 2

    @property
    def oy(self) -> int:
        return (self.w - self.content_h) // 2

    def _tx0(self, tx: int) -> int:
        return self.ox + self._FRAME + tx * (self.px_per_tile + self.channel_px)

    def _ty0(self, ty: int) -> int:
        return self.oy + self._FRAME + ty * (self.px_per_tile + self.channel_px)

    def tile_rect(self, tx: int, ty: int) -> tuple[int, int, int, int]:
        """Half-open pixel rect (x0, y0, x1, y1) of full-grid tile (tx, ty)."""
        if not (0 <= tx < self.cols + 2 and 0 <= ty < self.rows + 2):
            raise ValidationError(f"tile ({tx}, {ty}) outside full grid")
        x0, y0 = self._tx0(tx), self._ty0(ty)
        return (x0, y0, x0 + self.px_per_tile, y0 + self.px_per_tile)

    def tile_center(self, tx: int, ty: int) -> tuple[int, int]:
        x0, y0, x1, y1 = self.tile_rect(tx, ty)
        return ((x0 + x1) // 2, (y0 + y1) // 2)

    def hseg_rect(self, sx: int, hy: int) -> tuple[int, int, int, int]:
        if not (0 <= sx < self.cols and 0 <= hy <= self.rows):
            raise ValidationError(f"horizontal segment ({sx}, {hy}) out of range")
        x0 = self._tx0(sx + 1)
        y0 = self._ty0(hy) + self.px_per_tile
        return (x0, y0, x0 + self.px_per_tile, y0 + self.channel_px)

    def vseg_rect(self, vx: int, sy: int) -> tuple[int, int, int, int]:
        if not (0 <= vx <= self.cols and 0 <= sy < self.rows):
            raise ValidationError(f"vertical segment ({vx}, {sy}) out of range")
        x0 = self._tx0(vx) + self.px_per_tile
        y0 = self._ty0(sy + 1)
        return (x0, y0, x0 + self.channel_px, y0 + self.px_per_tile)

    def channel_mask(self) -> np.ndarray:
        """Boolean (w, w) mask of every channel-strip pixel."""
        m = np.zeros((self.w, self.w), dtype=bool)
        for hy in range(self.rows + 1):
            for sx in range(self.cols):
                x0, y0, x1, y1 = self.hseg_rect(sx, hy)
                m[y0:y1, x0:x1] = True
        for sy in range(self.rows):
            for vx in range(self.cols + 1):
                x0, y0, x1, y1 = self.vseg_rect(vx, sy)
                m[y0:y1, x0:x1] = True
        return m


def _check_layout(fp: Floorplan, layout: RasterLayout) -> None:
    if layout.cols != fp.cols or layout.rows != fp.rows:
        raise ValidationError(
            f"layout is {layout.cols}x{layout.rows} but floorplan is {fp.cols}x{fp.rows}"
        )


def render_floorplan(fp: Floorplan, layout: RasterLayout, scheme: ColorScheme = DEFAULT_SCHEME) -> ImagePlane:
    """Empty device: colored logic columns, white channels, outlined ring."""
    _check_layout(fp, layout)
    a = np.ones((layout.w, layout.w, 3), dtype=np.float32)
    # outline around the pad ring
    x0, y0 = layout.ox, layout.oy
    x1, y1 = x0 + layout.content_w, y0 + layout.content_h
    a[y0:y1, x0, :] = scheme.black
    a[y0:y1, x1 - 1, :] = scheme.black
    a[y0, x0:x1, :] = scheme.black
    a[y1 - 1, x0:x1, :] = scheme.black
    fill = {CLB: scheme.lightblue, MEM: scheme.lightyellow, MULT: scheme.pink}
    for r in range(fp.rows):
        for c in range(fp.cols):
            color = fill[fp.tile_kind(c + 1, r + 1)]
            tx0, ty0, tx1, ty1 = layout.tile_rect(c + 1, r + 1)
            a[ty0:ty1, tx0:tx1, :] = color
    return ImagePlane(a)


def render_placement(
    fp: Floorplan,
    placement: Placement,
    layout: RasterLayout,
    scheme: ColorScheme = DEFAULT_SCHEME,
) -> ImagePlane:
    """Floorplan image with occupied tiles blacked in.

    Logic tiles go fully black; pad tiles fill proportionally to used ports
    (row-major pixel order within the rect, so k of P ports blackens
    round(k/P * area) pixels).
    """
    _check_layout(fp, layout)
    img = render_floorplan(fp, layout, scheme)
    a = img.arr
    per_tile: dict[tuple[int, int], int] = {}
    for x, y, _sub in placement.assignment.values():
        per_tile[(x, y)] = per_tile.get((x, y), 0) + 1
    for (x, y), k in sorted(per_tile.items()):
        kind = fp.tile_kind(x, y)
        x0, y0, x1, y1 = layout.tile_rect(x, y)
        if kind in (CLB, MEM, MULT):
            a[y0:y1, x0:x1, :] = scheme.black
        else:  # pad: partial fill
            area = (x1 - x0) * (y1 - y0)
            n_black = int(round(k / fp.io_ports_per_pad * area))
            flat = a[y0:y1, x0:x1, :].reshape(area, 3)
            flat[:n_black] = scheme.black
            a[y0:y1, x0:x1, :] = flat.reshape(y1 - y0, x1 - x0, 3)
    return ImagePlane(a)


def _line_pixels(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    # Bresenham, endpoints included
    out = []
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    x, y = x0, y0
    while True:
        out.append((x, y))
        if x == x1 and y == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy
    return out


def render_connectivity(
    netlist: Netlist,
    placement: Placement,
    layout: RasterLayout,
    edge_intensity: float = 0.25,
) -> ImagePlane:
    """Driver-to-sink star edges drawn additively into one channel."""
    if not (0.0 < edge_intensity <= 1.0):
        raise ValidationError(f"edge_intensity must be in (0, 1], got {edge_intensity}")
    acc = np.zeros((layout.w, layout.w), dtype=np.float64)
    for net in netlist.nets:
        dx, dy = layout.tile_center(*placement.tile_of(net.driver))
        for sink in net.sinks:
            sx, sy = layout.tile_center(*placement.tile_of(sink))
            for px, py in _line_pixels(dx, dy, sx, sy):
                acc[py, px] += edge_intensity
    return ImagePlane(np.clip(acc, 0.0, 1.0)[:, :, None].astype(np.float32))


def render_heatmap(
    util: ChannelUtilization,
    base: ImagePlane,
    layout: RasterLayout,
    scheme: ColorScheme = DEFAULT_SCHEME,
) -> ImagePlane:
    """Recolor used channel strips of a placement image by utilization.

    Unused segments (u == 0) keep their base pixels, so the output differs
    from `base` only inside channel strips.
    """
    if util.cols != layout.cols or util.rows != layout.rows:
        raise ValidationError(
            f"utilization is {util.cols}x{util.rows} but layout is {layout.cols}x{layout.rows}"
        )
    if base.height != layout.w or base.width != layout.w or base.channels != 3:
        raise ValidationError("base image does not match layout")
    a = base.arr.copy()
    for hy in range(util.rows + 1):
        for sx in range(util.cols):
            u = util.h[hy, sx]
            if u > 0:
                x0, y0, x1, y1 = layout.hseg_rect(sx, hy)
                a[y0:y1, x0:x1, :] = scheme.gradient(u)
    for sy in range(util.rows):
        for vx in range(util.cols + 1):
            u = util.v[sy, vx]
            if u > 0:
                x0, y0, x1, y1 = layout.vseg_rect(vx, sy)
                a[y0:y1, x0:x1, :] = scheme.gradient(u)
    return ImagePlane(a)


def _decode_strip(mean_rgb: np.ndarray, scheme: ColorScheme) -> tuple[float, float]:
    """(u, residual distance) for one strip's average color."""
    lo = np.array(scheme.gradient_low)
    hi = np.array(scheme.gradient_high)
    d = hi - lo
    t = float(np.clip(np.dot(mean_rgb - lo, d) / np.dot(d, d), 0.0, 1.0))
    on_line = lo + t * d
    dist_line = float(np.linalg.norm(mean_rgb - on_line))
    dist_white = float(np.linalg.norm(mean_rgb - np.array(scheme.white)))
    if dist_white <= dist_line:
        return 0.0, 0.0
    return t, dist_line


def decode_heatmap(
    img: ImagePlane,
    layout: RasterLayout,
    scheme: ColorScheme = DEFAULT_SCHEME,
    return_residual: bool = False,
):
    """Invert render_heatmap: average each strip, project onto the gradient.

    Strips nearer white than the gradient line decode to 0 (never used).
    With return_residual=True also returns (res_h, res_v) distances from
    the gradient line, nonzero where pixels sit off-gradient.
    """
    if img.height != layout.w or img.width != layout.w or img.channels != 3:
        raise ValidationError("image does not match layout")
    h = np.zeros((layout.rows + 1, layout.cols))
    res_h = np.zeros_like(h)
    v = np.zeros((layout.rows, layout.cols + 1))
    res_v = np.zeros_like(v)
    for hy in range(layout.rows + 1):
        for sx in range(layout.cols):
            x0, y0, x1, y1 = layout.hseg_rect(sx, hy)
            mean = img.arr[y0:y1, x0:x1, :].reshape(-1, 3).mean(axis=0).astype(np.float64)
            h[hy, sx], res_h[hy, sx] = _decode_strip(mean, scheme)
    for sy in range(layout.rows):
        for vx in range(layout.cols + 1):
            x0, y0, x1, y1 = layout.vseg_rect(vx, sy)
            mean = img.arr[y0:y1, x0:x1, :].reshape(-1, 3).mean(axis=0).astype(np.float64)
            v[sy, vx], res_v[sy, vx] = _decode_strip(mean, scheme)
    util = ChannelUtilization(h, v)
    if return_residual:
        return util, (res_h, res_v)
    return util


def stack_input(img_place: ImagePlane, img_connect: ImagePlane, lam: float) -> ImagePlane:
    """Model input: placement channels plus a scaled connectivity channel."""
    if lam < 0:
        raise ValidationError(f"lambda must be >= 0, got {lam}")
    if img_place.arr.shape[:2] != img_connect.arr.shape[:2]:
        raise ValidationError(
            f"size mismatch: place {img_place.arr.shape[:2]} vs connect {img_connect.arr.shape[:2]}"
        )
    if img_connect.channels != 1:
        raise ValidationError("connectivity image must have 1 channel")
    if img_place.channels not in (1, 3):
        raise ValidationError("placement image must have 1 or 3 channels")
    extra = np.clip(lam * img_connect.arr, 0.0, 1.0)
    return ImagePlane(np.concatenate([img_place.arr, extra], axis=2))


def to_grayscale(img: ImagePlane) -> ImagePlane:
    if img.channels != 3:
        raise ValidationError("grayscale conversion expects 3 channels")
    luma = 0.299 * img.arr[:, :, 0] + 0.587 * img.arr[:, :, 1] + 0.114 * img.arr[:, :, 2]
    return ImagePlane(np.clip(luma, 0.0, 1.0)[:, :, None])


_PNG_MODES = {1: "L", 3: "RGB", 4: "RGBA"}


def save_png(img: ImagePlane, path: str | Path) -> None:
    if img.channels not in _PNG_MODES:
        raise ValidationError(f"cannot write a {img.channels}-channel image as PNG")
    data = np.round(img.arr * 255.0).astype(np.uint8)
    mode = _PNG_MODES[img.channels]
    if img.channels == 1:
        data = data[:, :, 0]
    Image.fromarray(data, mode=mode).save(Path(path), format="PNG")


def load_png(path: str | Path) -> ImagePlane:
    p = Path(path)
    if not p.exists():
        raise ArtifactIOError(f"image file not found: {p}")
    try:
        im = Image.open(p)
        arr = np.asarray(im)
    except Exception as e:
        raise ArtifactIOError(f"cannot read image {p}: {e}") from e
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return ImagePlane(arr.astype(np.float32) / 255.0)
