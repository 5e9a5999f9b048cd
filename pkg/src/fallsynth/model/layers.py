"""Transformer building blocks on top of the autodiff tensors.

All layers take and return (batch, time, dim) tensors.  Blocks are pre-norm
residual, which trains stably at the small widths used here.
"""
from __future__ import annotations

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor


def xavier_uniform(rng: np.random.Generator, d_in: int, d_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (d_in + d_out))
    return rng.uniform(-limit, limit, size=(d_in, d_out))


def sinusoidal_positional_encoding(length: int, dim: int) -> np.ndarray:
    """Classic sin/cos table, (length, dim)."""
    position = np.arange(length)[:, None]
    term = np.exp(np.arange(0, dim, 2) * (-np.log(10000.0) / dim))
    pe = np.zeros((length, dim))
    pe[:, 0::2] = np.sin(position * term)
    pe[:, 1::2] = np.cos(position * term[: dim // 2])
    return pe


class Module:
    """Anything owning named parameters."""

    def parameters(self) -> dict[str, Tensor]:
        raise NotImplementedError


class Linear(Module):
    def __init__(self, rng: np.random.Generator, d_in: int, d_out: int, name: str):
        self.name = name
        self.w = Tensor(xavier_uniform(rng, d_in, d_out), requires_grad=True)
        self.b = Tensor(np.zeros(d_out), requires_grad=True)

    def __call__(self, x: Tensor) -> Tensor:
        return ad.add(ad.matmul(x, self.w), self.b)

    def parameters(self):
        return {f"{self.name}.w": self.w, f"{self.name}.b": self.b}


class LayerNorm(Module):
    def __init__(self, dim: int, name: str):
        self.name = name
        self.gain = Tensor(np.ones(dim), requires_grad=True)
        self.bias = Tensor(np.zeros(dim), requires_grad=True)

    def __call__(self, x: Tensor) -> Tensor:
        return ad.layer_norm(x, self.gain, self.bias)

    def parameters(self):
        return {f"{self.name}.gain": self.gain, f"{self.name}.bias": self.bias}


class MultiHeadAttention(Module):
    def __init__(self, rng: np.random.Generator, dim: int, num_heads: int, name: str):
        self.dim = dim
        self.num_heads = num_heads
        self.head_dim = dim // num_heads
        self.wq = Linear(rng, dim, dim, f"{name}.wq")
        self.wk = Linear(rng, dim, dim, f"{name}.wk")
        self.wv = Linear(rng, dim, dim, f"{name}.wv")
        self.wo = Linear(rng, dim, dim, f"{name}.wo")

    def _split(self, x: Tensor, batch: int, length: int) -> Tensor:
        x = ad.reshape(x, (batch, length, self.num_heads, self.head_dim))
        return ad.transpose(x, (0, 2, 1, 3))  # (B, H, T, dh)

    def __call__(self, query: Tensor, key: Tensor, value: Tensor) -> Tensor:
        batch, t_q = query.shape[0], query.shape[1]
        t_k = key.shape[1]
        q = self._split(self.wq(query), batch, t_q)
        k = self._split(self.wk(key), batch, t_k)
        v = self._split(self.wv(value), batch, t_k)
        scores = ad.mul(ad.matmul(q, ad.transpose(k)), 1.0 / np.sqrt(self.head_dim))
        attention = ad.softmax(scores, axis=-1)
        mixed = ad.matmul(attention, v)  # (B, H, Tq, dh)
        mixed = ad.transpose(mixed, (0, 2, 1, 3))
        return self.wo(ad.reshape(mixed, (batch, t_q, self.dim)))

    def parameters(self):
        out = {}
        for part in (self.wq, self.wk, self.wv, self.wo):
            out.update(part.parameters())
        return out


class FeedForward(Module):
    def __init__(self, rng, dim: int, hidden: int, name: str):
        self.lin1 = Linear(rng, dim, hidden, f"{name}.lin1")
        self.lin2 = Linear(rng, hidden, dim, f"{name}.lin2")

    def __call__(self, x: Tensor) -> Tensor:
        return self.lin2(ad.gelu(self.lin1(x)))

    def parameters(self):
        return {**self.lin1.parameters(), **self.lin2.parameters()}


class EncoderLayer(Module):
    def __init__(self, rng, dim: int, num_heads: int, ff_dim: int, name: str):
        self.ln1 = LayerNorm(dim, f"{name}.ln1")
        self.attn = MultiHeadAttention(rng, dim, num_heads, f"{name}.attn")
        self.ln2 = LayerNorm(dim, f"{name}.ln2")
        self.ff = FeedForward(rng, dim, ff_dim, f"{name}.ff")

    def __call__(self, x: Tensor) -> Tensor:
        h = self.ln1(x)
        x = ad.add(x, self.attn(h, h, h))
        return ad.add(x, self.ff(self.ln2(x)))

    def parameters(self):
        out = {}
        for part in (self.ln1, self.attn, self.ln2, self.ff):
            out.update(part.parameters())
        return out


class DecoderLayer(Module):
    def __init__(self, rng, dim: int, num_heads: int, ff_dim: int, name: str):
        self.ln1 = LayerNorm(dim, f"{name}.ln1")
        self.self_attn = MultiHeadAttention(rng, dim, num_heads, f"{name}.self_attn")
        self.ln2 = LayerNorm(dim, f"{name}.ln2")
        self.cross_attn = MultiHeadAttention(rng, dim, num_heads, f"{name}.cross_attn")
        self.ln3 = LayerNorm(dim, f"{name}.ln3")
        self.ff = FeedForward(rng, dim, ff_dim, f"{name}.ff")

    def __call__(self, x: Tensor, memory: Tensor) -> Tensor:
        h = self.ln1(x)
        x = ad.add(x, self.self_attn(h, h, h))
        x = ad.add(x, self.cross_attn(self.ln2(x), memory, memory))
        return ad.add(x, self.ff(self.ln3(x)))

    def parameters(self):
        out = {}
        for part in (self.ln1, self.self_attn, self.ln2, self.cross_attn, self.ln3, self.ff):
            out.update(part.parameters())
        return out
