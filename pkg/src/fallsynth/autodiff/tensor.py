"""Reverse-mode automatic differentiation over dense float64 arrays.

A Tensor records, at construction time, the parent tensors it was computed
from together with one vector-Jacobian closure per parent.  ``backward`` on
a scalar walks the recorded graph once in reverse topological order and
accumulates gradients into every tensor that requires them.  Graphs are
built per forward pass and consumed by a single backward call.
"""
from __future__ import annotations

import numpy as np


class ShapeMismatch(ValueError):
    """Operands with incompatible shapes; message carries both shapes."""


class NotScalarLoss(ValueError):
    """backward was called on a non-scalar tensor."""


class DisconnectedGraph(RuntimeError):
    """backward was called on a tensor with no differentiable ancestry."""


class GraphConsumed(RuntimeError):
    """backward was called twice on the same recorded graph."""


class Tensor:
    """A float64 array plus the tape entry that produced it.

    ``parents`` is a list of (parent, vjp) pairs where vjp maps the output
    gradient to this parent's gradient contribution.  Only parents that
    require gradients are recorded, so inference builds no graph at all.
    """

    __slots__ = ("data", "requires_grad", "grad", "parents", "_consumed")

    def __init__(self, data, requires_grad: bool = False, parents=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self.parents = parents or []
        self._consumed = False

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    # operator sugar; real work lives in ops.py
    def __add__(self, other):
        from .ops import add
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        from .ops import mul
        return mul(self, other)

    __rmul__ = __mul__

    def __sub__(self, other):
        from .ops import sub
        return sub(self, other)

    def __rsub__(self, other):
        from .ops import sub
        return sub(other, self)

    def __truediv__(self, other):
        from .ops import div
        return div(self, other)

    def __rtruediv__(self, other):
        from .ops import div
        return div(other, self)

    def __neg__(self):
        from .ops import mul
        return mul(self, -1.0)

    def __matmul__(self, other):
        from .ops import matmul
        return matmul(self, other)

    def __getitem__(self, key):
        from .ops import take
        return take(self, key)

    def reshape(self, *shape):
        from .ops import reshape
        return reshape(self, shape if len(shape) > 1 or isinstance(shape[0], int) else shape[0])

    def sum(self, axis=None, keepdims: bool = False):
        from .ops import reduce_sum
        return reduce_sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False):
        from .ops import reduce_mean
        return reduce_mean(self, axis=axis, keepdims=keepdims)

    def backward(self):
        """Accumulate d(self)/d(leaf) into every requires_grad tensor's .grad.

        self must be a scalar with differentiable ancestry.  A second call on
        the same graph raises GraphConsumed (step boundaries stay explicit).
        """
        if self.data.size != 1:
            raise NotScalarLoss(f"backward needs a scalar, got shape {self.data.shape}")
        if not self.requires_grad and not self.parents:
            raise DisconnectedGraph("tensor has no differentiable ancestry")
        if self._consumed:
            raise GraphConsumed("backward was already called on this graph")
        self._consumed = True

        order = _topological_order(self)
        grads: dict[int, np.ndarray] = {id(self): np.ones_like(self.data)}
        for node in order:
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node.requires_grad:
                node.grad = g if node.grad is None else node.grad + g
            for parent, vjp in node.parents:
                contribution = vjp(g)
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + contribution
                else:
                    grads[key] = contribution


def _topological_order(root: Tensor) -> list[Tensor]:
    """Reverse topological order via an iterative post-order walk."""
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent, _ in node.parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    order.reverse()
    return order


def as_tensor(value) -> Tensor:
    """Wrap plain arrays/scalars as constant tensors; pass Tensors through."""
    return value if isinstance(value, Tensor) else Tensor(value)


def unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a gradient down to ``shape``, undoing numpy broadcasting."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)
