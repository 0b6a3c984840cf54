"""Minimal reverse-mode tensor kernels: just enough for the cGAN."""

from .adam import Adam, AdamState, adam_step
from .functional import (
    activation,
    batchnorm,
    bce_loss,
    concat,
    conv2d,
    conv_transpose2d,
    dropout,
    l1_loss,
    leaky_relu,
    mean,
    relu,
    sigmoid,
    tanh,
)
from .layers import BatchNorm2d, Conv2d, ConvTranspose2d
from .tensor import Tensor

__all__ = [
    "Adam",
    "AdamState",
    "BatchNorm2d",
    "Conv2d",
    "ConvTranspose2d",
    "Tensor",
    "activation",
    "adam_step",
    "batchnorm",
    "bce_loss",
    "concat",
    "conv2d",
    "conv_transpose2d",
    "dropout",
    "l1_loss",
    "leaky_relu",
    "mean",
    "relu",
    "sigmoid",
    "tanh",
]
