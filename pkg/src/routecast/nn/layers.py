"""Parameterized layers: thin stateful wrappers over the functional ops.

Weights are init'd normal(0, 0.02), batchnorm gain normal(1, 0.02) with
zero shift. Convolutions carry no bias terms; nearly every conv here is
followed by a batchnorm, and the bias-free final layers make the zero-
weight behavior of the discriminator exact.
"""

from __future__ import annotations

import numpy as np

from ..errors import ValidationError
from . import functional as F
from .tensor import Tensor

_W_STD = 0.02


class Conv2d:
    def __init__(self, in_ch: int, out_ch: int, k: int = 4, stride: int = 2, pad: int = 1, *, rng: np.random.Generator):
        if in_ch < 1 or out_ch < 1:
            raise ValidationError("channel counts must be >= 1")
        self.stride = stride
        self.pad = pad
        self.w = Tensor(rng.normal(0.0, _W_STD, (out_ch, in_ch, k, k)).astype(np.float32), requires_grad=True)

    def forward(self, x: Tensor) -> Tensor:
        return F.conv2d(x, self.w, self.stride, self.pad)

    def parameters(self):
        return [("w", self.w)]

    def state(self):
        return []


class ConvTranspose2d:
    def __init__(self, in_ch: int, out_ch: int, k: int = 4, stride: int = 2, pad: int = 1, *, rng: np.random.Generator):
        if in_ch < 1 or out_ch < 1:
            raise ValidationError("channel counts must be >= 1")
        self.stride = stride
        self.pad = pad
        self.w = Tensor(rng.normal(0.0, _W_STD, (in_ch, out_ch, k, k)).astype(np.float32), requires_grad=True)

    def forward(self, x: Tensor) -> Tensor:
        return F.conv_transpose2d(x, self.w, self.stride, self.pad)

    def parameters(self):
        return [("w", self.w)]

    def state(self):
        return []


class BatchNorm2d:
    def __init__(self, ch: int, *, rng: np.random.Generator, momentum: float = 0.9, eps: float = 1e-5):
        if ch < 1:
            raise ValidationError("channel count must be >= 1")
        self.momentum = momentum
        self.eps = eps
        self.gamma = Tensor(rng.normal(1.0, _W_STD, ch).astype(np.float32), requires_grad=True)
        self.beta = Tensor(np.zeros(ch, dtype=np.float32), requires_grad=True)
        self.running_mean = np.zeros(ch, dtype=np.float32)
        self.running_var = np.ones(ch, dtype=np.float32)

    def forward(self, x: Tensor, training: bool) -> Tensor:
        return F.batchnorm(
            x,
            self.gamma,
            self.beta,
            training,
            self.running_mean,
            self.running_var,
            self.momentum,
            self.eps,
        )

    def parameters(self):
        return [("gamma", self.gamma), ("beta", self.beta)]

    def state(self):
        return [("running_mean", self.running_mean), ("running_var", self.running_var)]
