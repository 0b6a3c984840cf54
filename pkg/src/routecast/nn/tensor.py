"""Tape-based reverse-mode autodiff over numpy arrays.

A Tensor wraps an ndarray plus an optional gradient buffer. Ops build the
graph by recording parent tensors and a closure mapping the output gradient
to parent gradients. Graphs are built only where gradients can flow, so
inference allocates no tape.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..errors import ValidationError

_FLOATS = (np.float32, np.float64)


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        a = np.asarray(data)
        if a.dtype not in _FLOATS:
            a = a.astype(np.float32)
        self.data: np.ndarray = a
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[np.ndarray], Sequence[np.ndarray | None]] | None = None

    # -- graph construction --------------------------------------------------

    @staticmethod
    def _op(data: np.ndarray, parents: tuple["Tensor", ...], backward) -> "Tensor":
        out = Tensor(data)
        if any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = parents
            out._backward = backward
        return out

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    # -- properties ----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def item(self) -> float:
        return float(self.data)

    # -- backward pass ---------------------------------------------------------

    def backward(self) -> None:
        """Accumulate gradients of this scalar into every reachable leaf."""
        if self.data.size != 1:
            raise ValidationError(f"backward() needs a scalar, got shape {self.shape}")
        topo: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, done = stack.pop()
            if done:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen and p.requires_grad:
                    stack.append((p, False))
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._backward is None or node.grad is None:
                continue
            grads = node._backward(node.grad)
            for parent, g in zip(node._parents, grads):
                if g is None or not parent.requires_grad:
                    continue
                if parent.grad is None:
                    parent.grad = g.astype(parent.data.dtype, copy=True)
                else:
                    parent.grad += g

    def zero_grad(self) -> None:
        self.grad = None

    # -- light arithmetic (losses and rescaling only) -------------------------

    def __add__(self, other):
        if isinstance(other, Tensor):
            if self.shape != other.shape:
                raise ValidationError(f"add shape mismatch {self.shape} vs {other.shape}")
            return Tensor._op(self.data + other.data, (self, other), lambda g: (g, g))
        c = float(other)
        return Tensor._op(self.data + c, (self,), lambda g: (g,))

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, Tensor):
            if self.shape != other.shape:
                raise ValidationError(f"mul shape mismatch {self.shape} vs {other.shape}")
            a, b = self.data, other.data
            return Tensor._op(a * b, (self, other), lambda g: (g * b, g * a))
        c = float(other)
        return Tensor._op(self.data * c, (self,), lambda g: (g * c,))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other if isinstance(other, Tensor) else -float(other))

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.data.dtype}, grad={'yes' if self.requires_grad else 'no'})"
