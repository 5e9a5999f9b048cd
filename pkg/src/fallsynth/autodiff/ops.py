"""Differentiable primitives.

Each function computes the forward value with numpy, then wires a
vector-Jacobian closure per gradient-requiring input.  Binary elementwise
ops follow numpy broadcasting; the gradient is summed back down to each
operand's shape.
"""
from __future__ import annotations

import numpy as np
from scipy import special

from .tensor import ShapeMismatch, Tensor, as_tensor, unbroadcast

LAYER_NORM_EPS = 1e-5
_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _result(data, parents) -> Tensor:
    kept = [(p, vjp) for p, vjp in parents if p.requires_grad]
    return Tensor(data, requires_grad=bool(kept), parents=kept)


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data + b.data
    return _result(out, [(a, lambda g: unbroadcast(g, a.shape)),
                         (b, lambda g: unbroadcast(g, b.shape))])


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data - b.data
    return _result(out, [(a, lambda g: unbroadcast(g, a.shape)),
                         (b, lambda g: unbroadcast(-g, b.shape))])


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data * b.data
    return _result(out, [(a, lambda g: unbroadcast(g * b.data, a.shape)),
                         (b, lambda g: unbroadcast(g * a.data, b.shape))])


def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data / b.data
    return _result(out, [(a, lambda g: unbroadcast(g / b.data, a.shape)),
                         (b, lambda g: unbroadcast(-g * a.data / (b.data * b.data), b.shape))])


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeMismatch(f"matmul of {a.shape} with {b.shape}")
    out = a.data @ b.data

    def grad_a(g):
        return unbroadcast(g @ np.swapaxes(b.data, -1, -2), a.shape)

    def grad_b(g):
        return unbroadcast(np.swapaxes(a.data, -1, -2) @ g, b.shape)

    return _result(out, [(a, grad_a), (b, grad_b)])


def transpose(a, axes=None) -> Tensor:
    """Permute axes; default swaps the last two (matrix transpose)."""
    a = as_tensor(a)
    if axes is None:
        axes = tuple(range(a.ndim - 2)) + (a.ndim - 1, a.ndim - 2)
    inverse = tuple(np.argsort(axes))
    return _result(a.data.transpose(axes), [(a, lambda g: g.transpose(inverse))])


def reshape(a, shape) -> Tensor:
    a = as_tensor(a)
    return _result(a.data.reshape(shape), [(a, lambda g: g.reshape(a.shape))])


def concat(tensors, axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    out = np.concatenate([t.data for t in tensors], axis=axis)
    parents = []
    offset = 0
    for t in tensors:
        start, width = offset, t.shape[axis]

        def grad_piece(g, start=start, width=width):
            index = [slice(None)] * g.ndim
            index[axis] = slice(start, start + width)
            return g[tuple(index)]

        parents.append((t, grad_piece))
        offset += width
    return _result(out, parents)


def take(a, key) -> Tensor:
    """Numpy indexing as an op; gradient scatters back with accumulation."""
    a = as_tensor(a)
    out = a.data[key]

    def grad(g):
        full = np.zeros_like(a.data)
        np.add.at(full, key, g)
        return full

    return _result(out, [(a, grad)])


def reduce_sum(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    out = a.data.sum(axis=axis, keepdims=keepdims)

    def grad(g):
        if axis is None:
            return np.broadcast_to(g, a.shape).copy()
        if not keepdims:
            g = np.expand_dims(g, axis)
        return np.broadcast_to(g, a.shape).copy()

    return _result(out, [(a, grad)])


def reduce_mean(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    count = a.size if axis is None else np.prod([a.shape[i] for i in np.atleast_1d(axis)])
    out = a.data.mean(axis=axis, keepdims=keepdims)

    def grad(g):
        if axis is None:
            return np.broadcast_to(g / count, a.shape).copy()
        if not keepdims:
            g = np.expand_dims(g, axis)
        return np.broadcast_to(g / count, a.shape).copy()

    return _result(out, [(a, grad)])


def exp(a) -> Tensor:
    a = as_tensor(a)
    out = np.exp(a.data)
    return _result(out, [(a, lambda g: g * out)])


def log(a) -> Tensor:
    a = as_tensor(a)
    return _result(np.log(a.data), [(a, lambda g: g / a.data)])


def sqrt(a) -> Tensor:
    a = as_tensor(a)
    out = np.sqrt(a.data)
    return _result(out, [(a, lambda g: g / (2.0 * out))])


def relu(a) -> Tensor:
    a = as_tensor(a)
    mask = a.data > 0.0
    return _result(a.data * mask, [(a, lambda g: g * mask)])


def gelu(a) -> Tensor:
    """Exact (erf-based) GELU."""
    a = as_tensor(a)
    cdf = 0.5 * (1.0 + special.erf(a.data * _INV_SQRT2))
    pdf = _INV_SQRT2PI * np.exp(-0.5 * a.data * a.data)
    return _result(a.data * cdf, [(a, lambda g: g * (cdf + a.data * pdf))])


def softmax(a, axis: int = -1) -> Tensor:
    a = as_tensor(a)
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=axis, keepdims=True)

    def grad(g):
        return y * (g - (g * y).sum(axis=axis, keepdims=True))

    return _result(y, [(a, grad)])


def layer_norm(a, gain, bias, eps: float = LAYER_NORM_EPS) -> Tensor:
    """Normalize over the last axis, then scale and shift.

    The backward pass is the hand-derived fused expression rather than a
    composition of primitives; it is covered by the finite-difference suite.
    """
    a, gain, bias = as_tensor(a), as_tensor(gain), as_tensor(bias)
    mu = a.data.mean(axis=-1, keepdims=True)
    centered = a.data - mu
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = centered * inv
    out = xhat * gain.data + bias.data

    def grad_a(g):
        dxhat = g * gain.data
        term = dxhat - dxhat.mean(axis=-1, keepdims=True) \
            - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
        return inv * term

    return _result(out, [(a, grad_a),
                         (gain, lambda g: unbroadcast(g * xhat, gain.shape)),
                         (bias, lambda g: unbroadcast(g, bias.shape))])


def embedding_lookup(table, indices) -> Tensor:
    """Rows of ``table`` selected by an integer array; gradients accumulate
    into repeated rows."""
    table = as_tensor(table)
    idx = np.asarray(indices)
    if not np.issubdtype(idx.dtype, np.integer):
        raise ShapeMismatch(f"indices must be integers, got dtype {idx.dtype} for table {table.shape}")
    out = table.data[idx]

    def grad(g):
        full = np.zeros_like(table.data)
        np.add.at(full, idx, g)
        return full

    return _result(out, [(table, grad)])
