"""Minimal reverse-mode autodiff used by the motion model."""
from .ops import (
    add,
    concat,
    div,
    embedding_lookup,
    exp,
    gelu,
    layer_norm,
    log,
    matmul,
    mul,
    reduce_mean,
    reduce_sum,
    relu,
    reshape,
    softmax,
    sqrt,
    sub,
    take,
    transpose,
)
from .tensor import (
    DisconnectedGraph,
    GraphConsumed,
    NotScalarLoss,
    ShapeMismatch,
    Tensor,
    as_tensor,
)

__all__ = [
    "Tensor",
    "as_tensor",
    "DisconnectedGraph",
    "GraphConsumed",
    "NotScalarLoss",
    "ShapeMismatch",
    "add",
    "concat",
    "div",
    "embedding_lookup",
    "exp",
    "gelu",
    "layer_norm",
    "log",
    "matmul",
    "mul",
    "reduce_mean",
    "reduce_sum",
    "relu",
    "reshape",
    "softmax",
    "sqrt",
    "sub",
    "take",
    "transpose",
]
