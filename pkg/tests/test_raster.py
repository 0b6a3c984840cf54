import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from routecast.arch import make_floorplan
from routecast.errors import ArtifactIOError, ValidationError
from routecast.netlist import SyntheticParams, generate_synthetic
from routecast.placer import random_placement
from routecast.raster import (
    DEFAULT_SCHEME,
    ColorScheme,
    ImagePlane,
    RasterLayout,
    decode_heatmap,
    load_png,
    render_connectivity,
    render_floorplan,
    render_heatmap,
    render_placement,
    save_png,
    stack_input,
    to_grayscale,
)
from routecast.router import ChannelUtilization


@pytest.fixture(scope="module")
def fp4():
    return make_floorplan(cols=4, rows=4, mem_col=1, mult_col=3)


@pytest.fixture(scope="module")
def layout4(fp4):
    return RasterLayout.for_floorplan(fp4, w=48)


def random_util(cols, rows, seed, quantized=False):
    rng = np.random.default_rng(seed)
    h = rng.random((rows + 1, cols))
    v = rng.random((rows, cols + 1))
    if quantized:
        h = np.round(h * 16) / 16
        v = np.round(v * 16) / 16
    return ChannelUtilization(h, v)


# -- color scheme -------------------------------------------------------------


def test_default_scheme_valid():
    s = DEFAULT_SCHEME
    assert np.allclose(s.gradient(0.0), s.gradient_low)
    assert np.allclose(s.gradient(1.0), s.gradient_high)
    assert np.allclose(s.gradient(0.5), np.add(s.gradient_low, s.gradient_high) / 2)
    # clipped outside [0, 1]
    assert np.allclose(s.gradient(2.0), s.gradient_high)


def test_scheme_rejects_bad_rgb():
    with pytest.raises(ValidationError, match="RGB"):
        ColorScheme(white=(1.0, 1.0, 2.0))


def test_scheme_rejects_duplicate_flats():
    with pytest.raises(ValidationError, match="distinct"):
        ColorScheme(lightblue=(1.0, 0.753, 0.796))  # same as pink


def test_scheme_rejects_degenerate_gradient():
    with pytest.raises(ValidationError, match="gradient endpoints"):
        ColorScheme(gradient_low=(0.5, 0.5, 0.5), gradient_high=(0.5, 0.5, 0.5))


def test_scheme_rejects_white_on_gradient():
    # a black-to-white ramp passes through white itself
    with pytest.raises(ValidationError, match="ambiguous"):
        ColorScheme(gradient_low=(0.0, 0.0, 0.0), gradient_high=(1.0, 1.0, 1.0))


# -- image plane ---------------------------------------------------------------


def test_image_plane_validation():
    with pytest.raises(ValidationError):
        ImagePlane(np.zeros((4, 4)))
    with pytest.raises(ValidationError):
        ImagePlane(np.zeros((4, 4, 5)))
    with pytest.raises(ValidationError):
        ImagePlane(np.full((2, 2, 3), 1.5))
    img = ImagePlane(np.zeros((2, 3, 1)))
    assert (img.height, img.width, img.channels) == (2, 3, 1)
    # 2-channel planes are legal as model-input stacks but not writable PNGs
    two = ImagePlane(np.zeros((2, 2, 2)))
    with pytest.raises(ValidationError, match="PNG"):
        save_png(two, "/tmp/never-written.png")


# -- layout geometry -----------------------------------------------------------


def test_layout_content_formula(layout4):
    # 6 tile columns of 4px, 5 channels of 2px, 1px frame each side
    assert layout4.content_w == 2 + 6 * 4 + 5 * 2
    assert layout4.content_h == layout4.content_w


def test_layout_overflow_rejected(fp4):
    with pytest.raises(ValidationError, match="overflow"):
        RasterLayout.for_floorplan(fp4, w=16)


def test_layout_validation():
    with pytest.raises(ValidationError):
        RasterLayout(4, 4, 64, px_per_tile=1)
    with pytest.raises(ValidationError):
        RasterLayout(4, 4, 64, channel_px=0)
    with pytest.raises(ValidationError):
        RasterLayout(0, 4, 64)


def test_tile_and_seg_rects_disjoint(layout4):
    cover = np.zeros((layout4.w, layout4.w), dtype=int)
    for ty in range(layout4.rows + 2):
        for tx in range(layout4.cols + 2):
            x0, y0, x1, y1 = layout4.tile_rect(tx, ty)
            cover[y0:y1, x0:x1] += 1
    for hy in range(layout4.rows + 1):
        for sx in range(layout4.cols):
            x0, y0, x1, y1 = layout4.hseg_rect(sx, hy)
            cover[y0:y1, x0:x1] += 1
    for sy in range(layout4.rows):
        for vx in range(layout4.cols + 1):
            x0, y0, x1, y1 = layout4.vseg_rect(vx, sy)
            cover[y0:y1, x0:x1] += 1
    assert cover.max() == 1  # nothing overlaps


def test_channel_mask_matches_rects(layout4):
    m = layout4.channel_mask()
    x0, y0, x1, y1 = layout4.hseg_rect(2, 1)
    assert m[y0:y1, x0:x1].all()
    x0, y0, x1, y1 = layout4.tile_rect(1, 1)
    assert not m[y0:y1, x0:x1].any()
    n_strip_px = (layout4.rows + 1) * layout4.cols * layout4.px_per_tile * layout4.channel_px \
        + layout4.rows * (layout4.cols + 1) * layout4.px_per_tile * layout4.channel_px
    assert int(m.sum()) == n_strip_px


def test_rect_range_checks(layout4):
    with pytest.raises(ValidationError):
        layout4.tile_rect(6, 0)
    with pytest.raises(ValidationError):
        layout4.hseg_rect(4, 0)
    with pytest.raises(ValidationError):
        layout4.vseg_rect(0, 4)


# -- rendering -----------------------------------------------------------------


def test_render_floorplan_colors(fp4, layout4):
    img = render_floorplan(fp4, layout4)
    a = img.arr
    assert a.shape == (48, 48, 3)
    # CLB, MEM, MULT columns picked up their fills
    x, y = layout4.tile_center(0 + 1, 0 + 1)
    assert np.allclose(a[y, x], DEFAULT_SCHEME.lightblue, atol=1e-6)
    x, y = layout4.tile_center(1 + 1, 0 + 1)
    assert np.allclose(a[y, x], DEFAULT_SCHEME.lightyellow, atol=1e-6)
    x, y = layout4.tile_center(3 + 1, 0 + 1)
    assert np.allclose(a[y, x], DEFAULT_SCHEME.pink, atol=1e-6)
    # channels stay white
    x0, y0, x1, y1 = layout4.hseg_rect(0, 0)
    assert np.allclose(a[y0:y1, x0:x1], 1.0)
    # frame is black
    assert np.allclose(a[layout4.oy, layout4.ox], 0.0)


def test_render_floorplan_layout_mismatch(fp4):
    other = RasterLayout(5, 5, 64)
    with pytest.raises(ValidationError, match="floorplan"):
        render_floorplan(fp4, other)


@pytest.fixture(scope="module")
def placed4(fp4):
    net = generate_synthetic(SyntheticParams(n_clb=6, n_inpad=3, n_outpad=2, n_mem=1, n_mult=1), seed=3)
    pl = random_placement(net, fp4, seed=5)
    return net, pl


def test_render_placement_blackens_occupied(fp4, layout4, placed4):
    net, pl = placed4
    img = render_placement(fp4, pl, layout4)
    occupied_logic = {(x, y) for b, (x, y, _) in pl.assignment.items()
                      if net.blocks[b] in ("CLB", "MEM", "MULT")}
    for (x, y) in occupied_logic:
        x0, y0, x1, y1 = layout4.tile_rect(x, y)
        assert np.allclose(img.arr[y0:y1, x0:x1], 0.0)
    # an empty CLB keeps its fill
    empty = next(
        (c, r) for r in range(fp4.rows) for c in range(fp4.cols)
        if fp4.tile_kind(c + 1, r + 1) == "CLB" and (c + 1, r + 1) not in occupied_logic
    )
    x0, y0, x1, y1 = layout4.tile_rect(empty[0] + 1, empty[1] + 1)
    assert np.allclose(img.arr[y0:y1, x0:x1], DEFAULT_SCHEME.lightblue, atol=1e-6)


def test_render_placement_pad_fill_proportional(fp4, layout4, placed4):
    net, pl = placed4
    img = render_placement(fp4, pl, layout4)
    pads = {}
    for b, (x, y, _) in pl.assignment.items():
        if net.blocks[b] in ("INPAD", "OUTPAD"):
            pads[(x, y)] = pads.get((x, y), 0) + 1
    for (x, y), k in pads.items():
        x0, y0, x1, y1 = layout4.tile_rect(x, y)
        area = (x1 - x0) * (y1 - y0)
        want = int(round(k / fp4.io_ports_per_pad * area))
        got = int((img.arr[y0:y1, x0:x1] == 0).all(axis=2).sum())
        assert got == want


def test_render_connectivity(fp4, layout4, placed4):
    net, pl = placed4
    img = render_connectivity(net, pl, layout4, edge_intensity=0.25)
    assert img.channels == 1
    assert img.arr.max() <= 1.0
    assert img.arr.sum() > 0
    # driver and sink centers are lit
    some = net.nets[0]
    dx, dy = layout4.tile_center(*pl.tile_of(some.driver))
    assert img.arr[dy, dx, 0] > 0
    with pytest.raises(ValidationError):
        render_connectivity(net, pl, layout4, edge_intensity=0.0)


def test_heatmap_differs_only_in_strips(fp4, layout4, placed4):
    net, pl = placed4
    base = render_placement(fp4, pl, layout4)
    util = random_util(4, 4, seed=11)
    heat = render_heatmap(util, base, layout4)
    diff = np.any(heat.arr != base.arr, axis=2)
    mask = layout4.channel_mask()
    assert not (diff & ~mask).any()  # all changes inside channel strips


def test_heatmap_zero_keeps_base(fp4, layout4, placed4):
    net, pl = placed4
    base = render_placement(fp4, pl, layout4)
    util = ChannelUtilization(np.zeros((5, 4)), np.zeros((4, 5)))
    heat = render_heatmap(util, base, layout4)
    assert np.array_equal(heat.arr, base.arr)


def test_heatmap_shape_checks(fp4, layout4):
    base = render_floorplan(fp4, layout4)
    wrong = ChannelUtilization(np.zeros((6, 5)), np.zeros((5, 6)))
    with pytest.raises(ValidationError):
        render_heatmap(wrong, base, layout4)


@settings(derandomize=True, max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_decode_roundtrip_float(seed):
    fp = make_floorplan(cols=4, rows=4, mem_col=1, mult_col=3)
    layout = RasterLayout.for_floorplan(fp, w=48)
    base = render_floorplan(fp, layout)
    util = random_util(4, 4, seed)
    got = decode_heatmap(render_heatmap(util, base, layout), layout)
    assert np.abs(got.h - util.h).max() <= 0.01
    assert np.abs(got.v - util.v).max() <= 0.01


def test_decode_roundtrip_through_png(tmp_path, fp4, layout4):
    base = render_floorplan(fp4, layout4)
    util = random_util(4, 4, seed=99, quantized=True)
    p = tmp_path / "hm.png"
    save_png(render_heatmap(util, base, layout4), p)
    got = decode_heatmap(load_png(p), layout4)
    assert np.abs(got.h - util.h).max() <= 0.01
    assert np.abs(got.v - util.v).max() <= 0.01


def test_decode_residual_flags_off_gradient(fp4, layout4):
    base = render_floorplan(fp4, layout4)
    util = random_util(4, 4, seed=1)
    heat = render_heatmap(util, base, layout4)
    # corrupt one strip with an off-gradient color
    x0, y0, x1, y1 = layout4.hseg_rect(1, 1)
    heat.arr[y0:y1, x0:x1] = (0.0, 1.0, 0.0)
    _, (res_h, res_v) = decode_heatmap(heat, layout4, return_residual=True)
    assert res_h[1, 1] > 0.1
    assert res_v.max() < 1e-6


def test_stack_input(fp4, layout4, placed4):
    net, pl = placed4
    place = render_placement(fp4, pl, layout4)
    conn = render_connectivity(net, pl, layout4)
    x = stack_input(place, conn, lam=0.1)
    assert x.channels == 4
    assert np.array_equal(x.arr[:, :, :3], place.arr)
    assert np.allclose(x.arr[:, :, 3], np.clip(0.1 * conn.arr[:, :, 0], 0, 1))
    with pytest.raises(ValidationError):
        stack_input(place, place, lam=0.1)
    with pytest.raises(ValidationError):
        stack_input(place, conn, lam=-1)


def test_to_grayscale(fp4, layout4):
    img = render_floorplan(fp4, layout4)
    g = to_grayscale(img)
    assert g.channels == 1
    luma = 0.299 * img.arr[..., 0] + 0.587 * img.arr[..., 1] + 0.114 * img.arr[..., 2]
    assert np.allclose(g.arr[..., 0], luma, atol=1e-6)
    with pytest.raises(ValidationError):
        to_grayscale(g)


def test_png_roundtrip(tmp_path, rng):
    img = ImagePlane(rng.random((10, 12, 3)).astype(np.float32))
    p = tmp_path / "x.png"
    save_png(img, p)
    back = load_png(p)
    assert back.arr.shape == img.arr.shape
    assert np.abs(back.arr - img.arr).max() <= 0.5 / 255 + 1e-6
    with pytest.raises(ArtifactIOError):
        load_png(tmp_path / "none.png")


def test_png_grayscale_roundtrip(tmp_path, rng):
    img = ImagePlane(rng.random((6, 6, 1)).astype(np.float32))
    p = tmp_path / "g.png"
    save_png(img, p)
    back = load_png(p)
    assert back.channels == 1
    assert np.abs(back.arr - img.arr).max() <= 0.5 / 255 + 1e-6
