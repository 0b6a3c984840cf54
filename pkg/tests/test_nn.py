"""Gradient checks and reference-implementation equivalence for the tensor core.

Every differentiable op is checked against central finite differences in
double precision. Losses are built as mean(op(x) * R) with a fixed random
R so that no gradient component can hide behind a symmetry; normalized ops
get an extra tanh since their raw second moment is nearly input-invariant.
"""

import numpy as np
import pytest

from oracles import (
    fd_grad,
    hand_adam_step,
    naive_conv2d,
    naive_conv_transpose2d,
    rel_err,
)
from routecast import nn
from routecast.errors import ValidationError
from routecast.nn import Adam, AdamState, Tensor, adam_step

TOL = 1e-4


def check_grad(build, x0, tol=TOL, eps=1e-6):
    """build maps a Tensor to a scalar Tensor; FD-check d(build)/dx at x0."""
    x0 = np.asarray(x0, dtype=np.float64)
    xt = Tensor(x0.copy(), requires_grad=True)
    build(xt).backward()
    got = xt.grad
    assert got is not None
    want = fd_grad(lambda a: float(build(Tensor(a.copy())).data), x0, eps=eps)
    err = rel_err(got, want)
    assert err < tol, f"rel err {err:.3g}"


def weighted(op):
    """Loss wrapper: mean(op(x) * R), R fixed by shape."""

    def build(x):
        r = Tensor(np.random.default_rng(777).standard_normal(op(x).shape))
        return nn.mean(op(x) * r)

    return build


CONV_SHAPES = [
    # (N, Cin, H, W, Cout, k, stride, pad)
    (1, 1, 5, 5, 1, 3, 1, 0),
    (2, 3, 6, 6, 4, 4, 2, 1),
    (1, 2, 7, 5, 3, 3, 2, 1),
    (2, 1, 4, 4, 2, 1, 1, 0),
    (1, 4, 6, 6, 2, 4, 2, 2),
    (1, 2, 8, 8, 1, 5, 1, 2),
]


@pytest.mark.parametrize("shape", CONV_SHAPES)
def test_conv2d_grad_x(shape):
    n, ci, h, w, co, k, s, p = shape
    rng = np.random.default_rng(hash(shape) % 2**32)
    wt = Tensor(rng.standard_normal((co, ci, k, k)))
    check_grad(weighted(lambda x: nn.conv2d(x, wt, s, p)), rng.standard_normal((n, ci, h, w)))


@pytest.mark.parametrize("shape", CONV_SHAPES)
def test_conv2d_grad_w(shape):
    n, ci, h, w, co, k, s, p = shape
    rng = np.random.default_rng(hash(shape) % 2**31)
    xt = Tensor(rng.standard_normal((n, ci, h, w)))
    check_grad(weighted(lambda wv: nn.conv2d(xt, wv, s, p)), rng.standard_normal((co, ci, k, k)))


@pytest.mark.parametrize("shape", CONV_SHAPES)
def test_conv_transpose2d_grad_x(shape):
    n, ci, h, w, co, k, s, p = shape
    if (h - 1) * s + k - 2 * p < 1 or (w - 1) * s + k - 2 * p < 1:
        pytest.skip("empty output")
    rng = np.random.default_rng(hash(shape) % 2**30)
    wt = Tensor(rng.standard_normal((ci, co, k, k)))
    check_grad(weighted(lambda x: nn.conv_transpose2d(x, wt, s, p)), rng.standard_normal((n, ci, h, w)))


@pytest.mark.parametrize("shape", CONV_SHAPES)
def test_conv_transpose2d_grad_w(shape):
    n, ci, h, w, co, k, s, p = shape
    if (h - 1) * s + k - 2 * p < 1 or (w - 1) * s + k - 2 * p < 1:
        pytest.skip("empty output")
    rng = np.random.default_rng(hash(shape) % 2**29)
    xt = Tensor(rng.standard_normal((n, ci, h, w)))
    check_grad(weighted(lambda wv: nn.conv_transpose2d(xt, wv, s, p)), rng.standard_normal((ci, co, k, k)))


BN_SHAPES = [(2, 3, 4, 4), (1, 1, 6, 6), (4, 2, 3, 3), (2, 5, 2, 2), (3, 4, 5, 3)]


def bn_loss(training):
    def op(x):
        c = x.shape[1]
        gamma = Tensor(np.linspace(0.5, 1.5, c))
        beta = Tensor(np.linspace(-0.3, 0.3, c))
        y = nn.batchnorm(x, gamma, beta, training, np.zeros(c), np.ones(c))
        return nn.tanh(y)

    return weighted(op)


@pytest.mark.parametrize("shape", BN_SHAPES)
def test_batchnorm_grad_x_train(shape):
    rng = np.random.default_rng(sum(shape))
    check_grad(bn_loss(training=True), 0.5 + rng.standard_normal(shape))


@pytest.mark.parametrize("shape", BN_SHAPES)
def test_batchnorm_grad_x_eval(shape):
    rng = np.random.default_rng(sum(shape) + 1)
    check_grad(bn_loss(training=False), rng.standard_normal(shape))


@pytest.mark.parametrize("shape", BN_SHAPES)
def test_batchnorm_grad_gamma_beta(shape):
    rng = np.random.default_rng(sum(shape) + 2)
    xd = rng.standard_normal(shape)
    c = shape[1]

    def build_gamma(gm):
        y = nn.batchnorm(Tensor(xd), gm, Tensor(np.zeros(c)), True, np.zeros(c), np.ones(c))
        r = Tensor(np.random.default_rng(778).standard_normal(shape))
        return nn.mean(y * r)

    check_grad(build_gamma, rng.standard_normal(c))

    def build_beta(bt):
        y = nn.batchnorm(Tensor(xd), Tensor(np.ones(c)), bt, True, np.zeros(c), np.ones(c))
        r = Tensor(np.random.default_rng(779).standard_normal(shape))
        return nn.mean(y * r)

    check_grad(build_beta, rng.standard_normal(c))


ELEM_SHAPES = [(3,), (2, 5), (1, 3, 4), (2, 2, 3, 3), (7, 1)]


@pytest.mark.parametrize("shape", ELEM_SHAPES)
@pytest.mark.parametrize("kind", ["relu", "leaky_relu", "tanh", "sigmoid"])
def test_activation_grads(kind, shape):
    rng = np.random.default_rng(len(kind) * 100 + sum(shape))
    x0 = rng.standard_normal(shape)
    x0 = np.where(np.abs(x0) < 0.1, 0.3, x0)  # keep clear of relu-family kinks
    check_grad(weighted(lambda x: nn.activation(x, kind)), x0)


def test_activation_unknown():
    with pytest.raises(ValidationError):
        nn.activation(Tensor(np.zeros(2)), "softplus")


@pytest.mark.parametrize("shape", ELEM_SHAPES)
def test_dropout_grad(shape):
    rng = np.random.default_rng(sum(shape) + 9)
    # fresh rng per evaluation makes the mask a pure function of the seed
    check_grad(
        weighted(lambda x: nn.dropout(x, 0.4, np.random.default_rng(303), training=True)),
        rng.standard_normal(shape),
    )


def test_dropout_modes(rng):
    x = Tensor(rng.random((4, 4)), requires_grad=True)
    assert nn.dropout(x, 0.5, None, training=False) is x
    assert nn.dropout(x, 0.0, None, training=True) is x
    with pytest.raises(ValidationError):
        nn.dropout(x, 1.0, rng, training=True)
    with pytest.raises(ValidationError):
        nn.dropout(x, 0.5, None, training=True)
    y = nn.dropout(x, 0.5, np.random.default_rng(1), training=True)
    kept = y.data != 0
    assert np.allclose(y.data[kept], x.data[kept] * 2.0)  # inverted scaling


@pytest.mark.parametrize("shape", ELEM_SHAPES)
def test_bce_grad(shape):
    rng = np.random.default_rng(sum(shape) + 13)
    pred = rng.uniform(0.05, 0.95, shape)
    target = (rng.random(shape) > 0.5).astype(float)
    check_grad(lambda p: nn.bce_loss(p, target), pred)


def test_bce_value():
    # hand-checked: -mean(t log p + (1-t) log(1-p))
    p = np.array([0.9, 0.2])
    t = np.array([1.0, 0.0])
    want = -(np.log(0.9) + np.log(0.8)) / 2
    assert float(nn.bce_loss(Tensor(p), t).data) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("shape", ELEM_SHAPES)
def test_l1_grad_both_sides(shape):
    rng = np.random.default_rng(sum(shape) + 17)
    b = rng.standard_normal(shape)
    gap = 0.2 + rng.random(shape)
    a0 = b + np.where(rng.random(shape) > 0.5, gap, -gap)  # stay off the kink
    bt = Tensor(b)
    check_grad(lambda a: nn.l1_loss(a, bt), a0)
    at = Tensor(a0)
    check_grad(lambda bv: nn.l1_loss(at, bv), b)


def test_l1_shape_mismatch():
    with pytest.raises(ValidationError):
        nn.l1_loss(Tensor(np.zeros(2)), Tensor(np.zeros(3)))


@pytest.mark.parametrize("shape", ELEM_SHAPES)
def test_mean_grad(shape):
    rng = np.random.default_rng(sum(shape) + 19)
    check_grad(lambda x: nn.mean(x * x), rng.standard_normal(shape) + 2.0)


def test_concat_grad():
    rng = np.random.default_rng(23)
    b = Tensor(rng.standard_normal((2, 3, 4, 4)))

    def build(x):
        y = nn.concat([x, b], axis=1)
        r = Tensor(np.random.default_rng(780).standard_normal(y.shape))
        return nn.mean(y * r)

    check_grad(build, rng.standard_normal((2, 2, 4, 4)))


def test_arithmetic_grads():
    rng = np.random.default_rng(29)
    yd = rng.standard_normal((3, 3))
    yt = Tensor(yd)
    check_grad(weighted(lambda x: x + yt), rng.standard_normal((3, 3)))
    check_grad(weighted(lambda x: x * yt), rng.standard_normal((3, 3)))
    check_grad(weighted(lambda x: x - yt), rng.standard_normal((3, 3)))
    check_grad(weighted(lambda x: -x + 2.0), rng.standard_normal((3, 3)))
    check_grad(weighted(lambda x: 3.0 * x), rng.standard_normal((3, 3)))


def test_shared_node_accumulates():
    x = Tensor(np.array([3.0]), requires_grad=True)
    (x * x).backward()
    assert np.allclose(x.grad, [6.0])


def test_backward_requires_scalar():
    x = Tensor(np.zeros(3), requires_grad=True)
    with pytest.raises(ValidationError):
        (x + 1.0).backward()


def test_no_tape_without_requires_grad(rng):
    x = Tensor(rng.random((2, 2)))
    y = nn.tanh(x) * 2.0
    assert not y.requires_grad
    assert y._parents == ()


def test_detach_blocks_gradient():
    x = Tensor(np.array([2.0]), requires_grad=True)
    y = x.detach() * 3.0
    assert not y.requires_grad


def test_int_input_becomes_float32():
    t = Tensor(np.array([1, 2, 3]))
    assert t.dtype == np.float32


# -- reference equivalence ----------------------------------------------------


def test_conv2d_bitwise_matches_naive():
    rng = np.random.default_rng(101)
    for _ in range(10):
        n, c, f = (int(rng.integers(1, 3)) for _ in range(3))
        k = int(rng.integers(1, 5))
        s = int(rng.integers(1, 3))
        p = int(rng.integers(0, 2))
        h = int(rng.integers(k, k + 5))
        wd = int(rng.integers(k, k + 5))
        x = rng.standard_normal((n, c, h, wd))
        w = rng.standard_normal((f, c, k, k))
        got = nn.conv2d(Tensor(x), Tensor(w), s, p).data
        assert got.dtype == np.float64
        assert np.array_equal(got, naive_conv2d(x, w, s, p))


def test_conv_transpose2d_bitwise_matches_naive():
    rng = np.random.default_rng(102)
    done = 0
    while done < 10:
        n, f, c = (int(rng.integers(1, 3)) for _ in range(3))
        k = int(rng.integers(1, 5))
        s = int(rng.integers(1, 3))
        p = int(rng.integers(0, 2))
        h = int(rng.integers(2, 7))
        wd = int(rng.integers(2, 7))
        if (h - 1) * s + k - 2 * p < 1 or (wd - 1) * s + k - 2 * p < 1:
            continue
        x = rng.standard_normal((n, f, h, wd))
        w = rng.standard_normal((f, c, k, k))
        got = nn.conv_transpose2d(Tensor(x), Tensor(w), s, p).data
        assert np.array_equal(got, naive_conv_transpose2d(x, w, s, p))
        done += 1


def test_float32_path_close_to_float64():
    rng = np.random.default_rng(103)
    x = rng.standard_normal((2, 3, 8, 8))
    w = rng.standard_normal((4, 3, 4, 4))
    got32 = nn.conv2d(Tensor(x.astype(np.float32)), Tensor(w.astype(np.float32)), 2, 1).data
    want = naive_conv2d(x, w, 2, 1)
    assert got32.dtype == np.float32
    assert rel_err(got32, want) < 1e-5


def test_conv_validation():
    with pytest.raises(ValidationError):
        nn.conv2d(Tensor(np.zeros((1, 2, 4, 4))), Tensor(np.zeros((1, 3, 3, 3))))
    with pytest.raises(ValidationError):
        nn.conv2d(Tensor(np.zeros((1, 2, 4, 4))), Tensor(np.zeros((1, 2, 3, 3))), stride=0)
    with pytest.raises(ValidationError, match="empty"):
        nn.conv2d(Tensor(np.zeros((1, 1, 2, 2))), Tensor(np.zeros((1, 1, 4, 4))))
    with pytest.raises(ValidationError, match="empty"):
        nn.conv_transpose2d(Tensor(np.zeros((1, 1, 2, 2))), Tensor(np.zeros((1, 1, 2, 2))), 1, 2)


# -- adam ----------------------------------------------------------------------


def test_adam_step_matches_hand_computation():
    rng = np.random.default_rng(31)
    p = rng.standard_normal((4, 3))
    g = rng.standard_normal((4, 3))
    state = AdamState(lr=0.01, beta1=0.9, beta2=0.99, eps=1e-8)
    got = adam_step([p.copy()], [g], state)[0]
    want, m, v = hand_adam_step(p, g, np.zeros_like(p), np.zeros_like(p), 1, 0.01, 0.9, 0.99, 1e-8)
    assert rel_err(got, want) < 1e-12
    assert rel_err(state.m[0], m) < 1e-12
    assert rel_err(state.v[0], v) < 1e-12


def test_adam_three_steps_track_oracle():
    rng = np.random.default_rng(37)
    p = rng.standard_normal(6)
    state = AdamState(lr=0.05, beta1=0.5, beta2=0.999, eps=1e-8)
    p_ref, m_ref, v_ref = p.copy(), np.zeros(6), np.zeros(6)
    p_fast = [p.copy()]
    for t in (1, 2, 3):
        g = rng.standard_normal(6)
        adam_step(p_fast, [g], state)
        p_ref, m_ref, v_ref = hand_adam_step(p_ref, g, m_ref, v_ref, t, 0.05, 0.5, 0.999, 1e-8)
        assert rel_err(p_fast[0], p_ref) < 1e-12
    assert state.t == 3


def test_adam_first_step_size_is_lr():
    # bias correction makes |Δp| == lr when g is constant, up to eps
    p = np.array([1.0])
    state = AdamState(lr=0.1, beta1=0.9, beta2=0.999, eps=1e-12)
    adam_step([p], [np.array([42.0])], state)
    assert abs(1.0 - p[0]) == pytest.approx(0.1, rel=1e-6)


def test_adam_validation():
    with pytest.raises(ValidationError):
        AdamState(lr=0)
    with pytest.raises(ValidationError):
        AdamState(beta1=1.0)
    state = AdamState()
    with pytest.raises(ValidationError):
        adam_step([np.zeros(2)], [], state)
    adam_step([np.zeros(2)], [np.zeros(2)], state)
    with pytest.raises(ValidationError):
        adam_step([np.zeros(3)], [np.zeros(2)], state)


def test_adam_optimizer_over_tensors():
    t = Tensor(np.array([1.0, 2.0]), requires_grad=True)
    opt = Adam([("p", t)], lr=0.1, beta1=0.9, beta2=0.999, eps=1e-12)
    nn.mean(t * t).backward()
    opt.step()
    assert state_close(t.data, np.array([0.9, 1.9]))
    opt.zero_grad()
    assert t.grad is None
    # with zero moments a missing grad means no movement at all
    t2 = Tensor(np.array([5.0]), requires_grad=True)
    opt2 = Adam([("q", t2)])
    opt2.step()
    assert np.array_equal(t2.data, [5.0])


def state_close(a, b):
    return np.allclose(a, b, atol=1e-6)


# -- layers ----------------------------------------------------------------------


def test_conv_layer_wraps_functional(rng):
    layer = nn.Conv2d(3, 5, k=4, stride=2, pad=1, rng=np.random.default_rng(7))
    x = Tensor(rng.random((2, 3, 8, 8)).astype(np.float32))
    got = layer.forward(x)
    want = nn.conv2d(x, layer.w, 2, 1)
    assert np.array_equal(got.data, want.data)
    assert got.shape == (2, 5, 4, 4)
    assert layer.parameters()[0][0] == "w"
    assert layer.state() == []


def test_deconv_layer_shape(rng):
    layer = nn.ConvTranspose2d(5, 3, rng=np.random.default_rng(8))
    x = Tensor(rng.random((2, 5, 4, 4)).astype(np.float32))
    assert layer.forward(x).shape == (2, 3, 8, 8)


def test_batchnorm_layer_running_stats(rng):
    bn = nn.BatchNorm2d(3, rng=np.random.default_rng(9), momentum=0.9)
    x = Tensor(rng.random((4, 3, 5, 5)).astype(np.float32) * 2.0)
    mu = x.data.mean(axis=(0, 2, 3))
    var = x.data.var(axis=(0, 2, 3))
    bn.forward(x, training=True)
    assert np.allclose(bn.running_mean, 0.1 * mu, atol=1e-6)
    assert np.allclose(bn.running_var, 0.9 + 0.1 * var, atol=1e-6)
    # eval mode normalizes with the running buffers, not batch stats
    rm, rv = bn.running_mean.copy(), bn.running_var.copy()
    y = bn.forward(x, training=False)
    xhat = (x.data - rm[None, :, None, None]) / np.sqrt(rv[None, :, None, None] + bn.eps)
    want = bn.gamma.data[None, :, None, None] * xhat + bn.beta.data[None, :, None, None]
    assert np.allclose(y.data, want, atol=1e-5)
    assert np.array_equal(bn.running_mean, rm)  # eval never touches buffers


def test_weight_init_statistics():
    rng = np.random.default_rng(11)
    layer = nn.Conv2d(64, 64, rng=rng)
    w = layer.w.data
    assert abs(float(w.mean())) < 0.005
    assert abs(float(w.std()) - 0.02) < 0.005
