"""Adam with bias correction.

Defaults follow the training recipe used everywhere in this package:
lr 2e-4, beta1 0.5, beta2 0.999, eps 1e-8.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError
from .tensor import Tensor


@dataclass
class AdamState:
    lr: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if self.lr <= 0 or not (0 <= self.beta1 < 1) or not (0 <= self.beta2 < 1) or self.eps <= 0:
            raise ValidationError("invalid Adam hyperparameters")
        if self.t < 0:
            raise ValidationError("step count must be >= 0")


def adam_step(params: list[np.ndarray], grads: list[np.ndarray], state: AdamState) -> list[np.ndarray]:
    """One update, in place on `params`. Moments live in `state`."""
    if len(params) != len(grads):
        raise ValidationError(f"{len(params)} params but {len(grads)} grads")
    if not state.m:
        state.m = [np.zeros_like(p) for p in params]
        state.v = [np.zeros_like(p) for p in params]
    for p, g, m in zip(params, grads, state.m):
        if p.shape != g.shape or p.shape != m.shape:
            raise ValidationError(f"shape mismatch: param {p.shape}, grad {g.shape}, moment {m.shape}")
    state.t += 1
    bc1 = 1.0 - state.beta1**state.t
    bc2 = 1.0 - state.beta2**state.t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m[...] = state.beta1 * m + (1.0 - state.beta1) * g
        v[...] = state.beta2 * v + (1.0 - state.beta2) * (g * g)
        p -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
    return params


class Adam:
    """Optimizer view over named Tensors; missing grads act as zeros."""

    def __init__(self, named_params: list[tuple[str, Tensor]], lr: float = 2e-4, beta1: float = 0.5, beta2: float = 0.999, eps: float = 1e-8):
        self.names = [n for n, _ in named_params]
        self.tensors = [t for _, t in named_params]
        self.state = AdamState(lr=lr, beta1=beta1, beta2=beta2, eps=eps)

    def zero_grad(self) -> None:
        for t in self.tensors:
            t.zero_grad()

    def step(self) -> None:
        grads = [t.grad if t.grad is not None else np.zeros_like(t.data) for t in self.tensors]
        adam_step([t.data for t in self.tensors], grads, self.state)
