"""Adam optimizer over a named parameter dict.

Parameter order is the sorted name list, so update order (and therefore the
trained weights) is reproducible regardless of how the dict was built.
"""
from __future__ import annotations

import numpy as np

from ..autodiff import Tensor


class Adam:
    def __init__(self, params: dict[str, Tensor], lr: float = 1e-4,
                 betas: tuple[float, float] = (0.9, 0.999), eps: float = 1e-8):
        self.params = {name: params[name] for name in sorted(params)}
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.step_count = 0
        self.m = {name: np.zeros_like(p.data) for name, p in self.params.items()}
        self.v = {name: np.zeros_like(p.data) for name, p in self.params.items()}

    def step(self):
        """Apply one update from the gradients currently on the parameters;
        parameters with no gradient this step are left unchanged."""
        self.step_count += 1
        correction1 = 1.0 - self.beta1 ** self.step_count
        correction2 = 1.0 - self.beta2 ** self.step_count
        for name, p in self.params.items():
            if p.grad is None:
                continue
            m = self.m[name] = self.beta1 * self.m[name] + (1.0 - self.beta1) * p.grad
            v = self.v[name] = self.beta2 * self.v[name] + (1.0 - self.beta2) * (p.grad * p.grad)
            p.data = p.data - self.lr * (m / correction1) / (np.sqrt(v / correction2) + self.eps)

    def zero_grad(self):
        for p in self.params.values():
            p.grad = None
