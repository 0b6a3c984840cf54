"""Differentiable ops.

Convolutions run one of two forward paths chosen by dtype:

* float64: an accumulation-order-faithful path that adds one (ci, kh, kw)
  product slice at a time, matching a naive gather loop bit for bit. This
  is the reference/verification mode.
* float32: im2col + GEMM, the fast training mode.

Backward passes share one GEMM-based implementation; gradient correctness
is what matters there, not accumulation order.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ValidationError
from .tensor import Tensor

_CLAMP = 1e-7


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _check_conv_args(x: np.ndarray, w: np.ndarray, stride: int, pad: int) -> None:
    if x.ndim != 4 or w.ndim != 4:
        raise ValidationError(f"conv expects 4-d tensors, got x{x.shape} w{w.shape}")
    if stride < 1 or pad < 0:
        raise ValidationError(f"stride must be >= 1 and pad >= 0, got s={stride} p={pad}")
    if x.dtype != w.dtype:
        raise ValidationError(f"dtype mismatch: x {x.dtype} vs w {w.dtype}")


# -- conv2d ------------------------------------------------------------------


def _conv2d_out_hw(H: int, W: int, KH: int, KW: int, s: int, p: int) -> tuple[int, int]:
    Ho = (H + 2 * p - KH) // s + 1
    Wo = (W + 2 * p - KW) // s + 1
    if Ho < 1 or Wo < 1:
        raise ValidationError(f"conv output would be empty: in {H}x{W}, k {KH}x{KW}, s={s}, p={p}")
    return Ho, Wo


def _im2col(xp: np.ndarray, KH: int, KW: int, s: int) -> np.ndarray:
    """(N, C, Hp, Wp) -> (C*KH*KW, N*Ho*Wo) patch matrix."""
    win = sliding_window_view(xp, (KH, KW), axis=(2, 3))[:, :, ::s, ::s]
    N, C, Ho, Wo = win.shape[:4]
    return win.transpose(1, 4, 5, 0, 2, 3).reshape(C * KH * KW, N * Ho * Wo)


def _col2im_add(cols: np.ndarray, out_shape, KH: int, KW: int, s: int, Ho: int, Wo: int) -> np.ndarray:
    """Scatter-add the inverse of _im2col. cols is (C*KH*KW, N*Ho*Wo)."""
    N, C = out_shape[0], out_shape[1]
    out = np.zeros(out_shape, dtype=cols.dtype)
    cols = cols.reshape(C, KH, KW, N, Ho, Wo)
    for kh in range(KH):
        for kw in range(KW):
            out[:, :, kh : kh + s * (Ho - 1) + 1 : s, kw : kw + s * (Wo - 1) + 1 : s] += cols[
                :, kh, kw
            ].transpose(1, 0, 2, 3)
    return out


def _conv2d_forward_exact(x: np.ndarray, w: np.ndarray, s: int, p: int) -> np.ndarray:
    N, Ci, H, W = x.shape
    Co, _, KH, KW = w.shape
    Ho, Wo = _conv2d_out_hw(H, W, KH, KW, s, p)
    xp = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p)))
    out = np.zeros((N, Co, Ho, Wo), dtype=x.dtype)
    for ci in range(Ci):
        xci = xp[:, ci]
        for kh in range(KH):
            for kw in range(KW):
                patch = xci[:, kh : kh + s * (Ho - 1) + 1 : s, kw : kw + s * (Wo - 1) + 1 : s]
                out += patch[:, None, :, :] * w[None, :, ci, kh, kw, None, None]
    return out


def _conv2d_forward_gemm(x: np.ndarray, w: np.ndarray, s: int, p: int) -> np.ndarray:
    N, Ci, H, W = x.shape
    Co, _, KH, KW = w.shape
    Ho, Wo = _conv2d_out_hw(H, W, KH, KW, s, p)
    xp = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p)))
    cols = _im2col(xp, KH, KW, s)
    out = (w.reshape(Co, -1) @ cols).reshape(Co, N, Ho, Wo)
    return np.ascontiguousarray(out.transpose(1, 0, 2, 3))


def conv2d(x, w, stride: int = 1, pad: int = 0) -> Tensor:
    """Cross-correlation, NCHW x (Cout, Cin, KH, KW)."""
    x, w = _as_tensor(x), _as_tensor(w)
    _check_conv_args(x.data, w.data, stride, pad)
    if x.data.shape[1] != w.data.shape[1]:
        raise ValidationError(f"channel mismatch: x has {x.data.shape[1]}, w expects {w.data.shape[1]}")
    fwd = _conv2d_forward_exact if x.data.dtype == np.float64 else _conv2d_forward_gemm
    out = fwd(x.data, w.data, stride, pad)
    xd, wd = x.data, w.data

    def backward(g):
        N, Ci, H, W = xd.shape
        Co, _, KH, KW = wd.shape
        Ho, Wo = g.shape[2:]
        xp = np.pad(xd, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
        cols = _im2col(xp, KH, KW, stride)
        G = g.transpose(1, 0, 2, 3).reshape(Co, -1)
        gw = (G @ cols.T).reshape(wd.shape) if w.requires_grad else None
        gx = None
        if x.requires_grad:
            colsg = wd.reshape(Co, -1).T @ G
            gxp = _col2im_add(colsg, xp.shape, KH, KW, stride, Ho, Wo)
            gx = gxp[:, :, pad : pad + H, pad : pad + W]
        return gx, gw

    return Tensor._op(out, (x, w), backward)


# -- conv_transpose2d ---------------------------------------------------------


def _deconv_out_hw(H: int, W: int, KH: int, KW: int, s: int, p: int) -> tuple[int, int]:
    Ho = (H - 1) * s + KH - 2 * p
    Wo = (W - 1) * s + KW - 2 * p
    if Ho < 1 or Wo < 1:
        raise ValidationError(f"deconv output would be empty: in {H}x{W}, k {KH}x{KW}, s={s}, p={p}")
    return Ho, Wo


def _deconv_forward_exact(x: np.ndarray, w: np.ndarray, s: int, p: int) -> np.ndarray:
    N, Ci, H, W = x.shape
    _, Co, KH, KW = w.shape
    Hf = (H - 1) * s + KH
    Wf = (W - 1) * s + KW
    full = np.zeros((N, Co, Hf, Wf), dtype=x.dtype)
    for ci in range(Ci):
        xci = x[:, ci][:, None]
        for kh in range(KH):
            for kw in range(KW):
                full[:, :, kh : kh + s * (H - 1) + 1 : s, kw : kw + s * (W - 1) + 1 : s] += (
                    xci * w[None, ci, :, kh, kw, None, None]
                )
    return full[:, :, p : Hf - p, p : Wf - p]


def _deconv_forward_gemm(x: np.ndarray, w: np.ndarray, s: int, p: int) -> np.ndarray:
    N, Ci, H, W = x.shape
    _, Co, KH, KW = w.shape
    Hf = (H - 1) * s + KH
    Wf = (W - 1) * s + KW
    xm = x.transpose(1, 0, 2, 3).reshape(Ci, -1)
    tmp = (w.reshape(Ci, -1).T @ xm).reshape(Co, KH, KW, N, H, W)
    full = np.zeros((N, Co, Hf, Wf), dtype=x.dtype)
    for kh in range(KH):
        for kw in range(KW):
            full[:, :, kh : kh + s * (H - 1) + 1 : s, kw : kw + s * (W - 1) + 1 : s] += tmp[
                :, kh, kw
            ].transpose(1, 0, 2, 3)
    return full[:, :, p : Hf - p, p : Wf - p]


def conv_transpose2d(x, w, stride: int = 1, pad: int = 0) -> Tensor:
    """Transposed convolution, NCHW x (Cin, Cout, KH, KW)."""
    x, w = _as_tensor(x), _as_tensor(w)
    _check_conv_args(x.data, w.data, stride, pad)
    if x.data.shape[1] != w.data.shape[0]:
        raise ValidationError(f"channel mismatch: x has {x.data.shape[1]}, w expects {w.data.shape[0]}")
    _deconv_out_hw(x.data.shape[2], x.data.shape[3], w.data.shape[2], w.data.shape[3], stride, pad)
    fwd = _deconv_forward_exact if x.data.dtype == np.float64 else _deconv_forward_gemm
    out = fwd(x.data, w.data, stride, pad)
    xd, wd = x.data, w.data

    def backward(g):
        N, Ci, H, W = xd.shape
        _, Co, KH, KW = wd.shape
        gp = np.pad(g, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
        cols = _im2col(gp, KH, KW, stride)  # (Co*KH*KW, N*H*W)
        gx = None
        gw = None
        if x.requires_grad:
            gx = (wd.reshape(Ci, -1) @ cols).reshape(Ci, N, H, W).transpose(1, 0, 2, 3)
            gx = np.ascontiguousarray(gx)
        if w.requires_grad:
            xm = xd.transpose(1, 0, 2, 3).reshape(Ci, -1)
            gw = (xm @ cols.T).reshape(wd.shape)
        return gx, gw

    return Tensor._op(out, (x, w), backward)


# -- batchnorm ----------------------------------------------------------------


def batchnorm(
    x,
    gamma,
    beta,
    training: bool,
    running_mean: np.ndarray,
    running_var: np.ndarray,
    momentum: float = 0.9,
    eps: float = 1e-5,
) -> Tensor:
    """Per-channel normalization over (batch, H, W).

    Train mode uses batch statistics and folds them into the running
    buffers (old * momentum + batch * (1 - momentum), biased variance);
    infer mode reads the running buffers.
    """
    x, gamma, beta = _as_tensor(x), _as_tensor(gamma), _as_tensor(beta)
    xd = x.data
    if xd.ndim != 4:
        raise ValidationError(f"batchnorm expects (N, C, H, W), got {xd.shape}")
    C = xd.shape[1]
    if gamma.data.shape != (C,) or beta.data.shape != (C,):
        raise ValidationError(f"gamma/beta must have shape ({C},)")
    if training:
        mu = xd.mean(axis=(0, 2, 3))
        var = xd.var(axis=(0, 2, 3))
        running_mean[...] = momentum * running_mean + (1.0 - momentum) * mu
        running_var[...] = momentum * running_var + (1.0 - momentum) * var
    else:
        mu = running_mean.astype(xd.dtype)
        var = running_var.astype(xd.dtype)
    ivar = 1.0 / np.sqrt(var + eps)
    xhat = (xd - mu[None, :, None, None]) * ivar[None, :, None, None]
    out = gamma.data[None, :, None, None] * xhat + beta.data[None, :, None, None]
    gd = gamma.data

    def backward(g):
        dbeta = g.sum(axis=(0, 2, 3)) if (beta.requires_grad or training) else None
        dgamma = (g * xhat).sum(axis=(0, 2, 3)) if (gamma.requires_grad or training) else None
        scale = (gd * ivar)[None, :, None, None]
        if training:
            m = float(xd.shape[0] * xd.shape[2] * xd.shape[3])
            dx = scale * (
                g
                - dbeta[None, :, None, None] / m
                - xhat * dgamma[None, :, None, None] / m
            )
        else:
            dx = scale * g
        return (
            dx if x.requires_grad else None,
            dgamma if gamma.requires_grad else None,
            dbeta if beta.requires_grad else None,
        )

    return Tensor._op(out, (x, gamma, beta), backward)


# -- activations ---------------------------------------------------------------


def relu(x) -> Tensor:
    x = _as_tensor(x)
    mask = x.data > 0
    return Tensor._op(np.where(mask, x.data, 0), (x,), lambda g: (g * mask,))


def leaky_relu(x, slope: float = 0.2) -> Tensor:
    x = _as_tensor(x)
    mask = x.data > 0
    out = np.where(mask, x.data, slope * x.data)
    return Tensor._op(out, (x,), lambda g: (g * np.where(mask, 1.0, slope).astype(g.dtype),))


def tanh(x) -> Tensor:
    x = _as_tensor(x)
    y = np.tanh(x.data)
    return Tensor._op(y, (x,), lambda g: (g * (1.0 - y * y),))


def sigmoid(x) -> Tensor:
    x = _as_tensor(x)
    with np.errstate(over="ignore"):  # saturated tails flush to exactly 0/1
        y = 1.0 / (1.0 + np.exp(-x.data))
    return Tensor._op(y, (x,), lambda g: (g * y * (1.0 - y),))


_ACTIVATIONS = {"relu": relu, "leaky_relu": leaky_relu, "tanh": tanh, "sigmoid": sigmoid}


def activation(x, kind: str) -> Tensor:
    if kind not in _ACTIVATIONS:
        raise ValidationError(f"unknown activation {kind!r}; choose from {sorted(_ACTIVATIONS)}")
    return _ACTIVATIONS[kind](x)


# -- dropout --------------------------------------------------------------------


def dropout(x, rate: float, rng: np.random.Generator | None, training: bool) -> Tensor:
    if not (0.0 <= rate < 1.0):
        raise ValidationError(f"dropout rate must be in [0, 1), got {rate}")
    x = _as_tensor(x)
    if not training or rate == 0.0:
        return x
    if rng is None:
        raise ValidationError("train-mode dropout needs an rng")
    mask = (rng.random(x.data.shape) >= rate).astype(x.data.dtype) / (1.0 - rate)
    return Tensor._op(x.data * mask, (x,), lambda g: (g * mask,))


# -- losses ----------------------------------------------------------------------


def bce_loss(pred, target) -> Tensor:
    """Mean binary cross-entropy with the prediction clamped away from {0,1}."""
    pred = _as_tensor(pred)
    t = np.broadcast_to(np.asarray(target, dtype=pred.data.dtype), pred.data.shape)
    p = np.clip(pred.data, _CLAMP, 1.0 - _CLAMP)
    loss = np.mean(-(t * np.log(p) + (1.0 - t) * np.log(1.0 - p)))
    inside = (pred.data >= _CLAMP) & (pred.data <= 1.0 - _CLAMP)

    def backward(g):
        gp = (-(t / p) + (1.0 - t) / (1.0 - p)) / p.size
        return (g * gp * inside,)

    return Tensor._op(np.asarray(loss, dtype=pred.data.dtype), (pred,), backward)


def l1_loss(a, b) -> Tensor:
    """Mean absolute difference; subgradient 0 at exact ties."""
    a, b = _as_tensor(a), _as_tensor(b)
    if a.shape != b.shape:
        raise ValidationError(f"l1 shape mismatch {a.shape} vs {b.shape}")
    diff = a.data - b.data
    loss = np.mean(np.abs(diff))
    sgn = np.sign(diff)

    def backward(g):
        ga = g * sgn / diff.size
        return (ga if a.requires_grad else None, -ga if b.requires_grad else None)

    return Tensor._op(np.asarray(loss, dtype=a.data.dtype), (a, b), backward)


# -- shape plumbing ----------------------------------------------------------------


def mean(x) -> Tensor:
    x = _as_tensor(x)
    n = x.data.size
    out = np.asarray(x.data.mean(), dtype=x.data.dtype)
    return Tensor._op(out, (x,), lambda g: (np.broadcast_to(g / n, x.data.shape),))


def concat(tensors, axis: int = 1) -> Tensor:
    ts = [_as_tensor(t) for t in tensors]
    if not ts:
        raise ValidationError("concat needs at least one tensor")
    out = np.concatenate([t.data for t in ts], axis=axis)
    sizes = [t.data.shape[axis] for t in ts]

    def backward(g):
        outs = []
        at = 0
        for s in sizes:
            sl = [slice(None)] * g.ndim
            sl[axis] = slice(at, at + s)
            outs.append(g[tuple(sl)])
            at += s
        return tuple(outs)

    return Tensor._op(out, tuple(ts), backward)
