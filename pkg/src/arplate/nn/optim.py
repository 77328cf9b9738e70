"""Adam optimizer over named parameter dicts."""
from __future__ import annotations

import numpy as np


class NonFiniteGradientError(RuntimeError):
    """A gradient contained NaN or infinity; training must abort."""


class Adam:
    """Adam with bias correction (beta1=0.9, beta2=0.999, eps=1e-8).

    State is keyed by parameter name, so the update is deterministic
    given the call sequence.
    """

    def __init__(self, learning_rate: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]):
        """Update params in place from grads; raises on non-finite grads."""
        for name, g in grads.items():
            if not np.all(np.isfinite(g)):
                raise NonFiniteGradientError(f"non-finite gradient for {name!r}")
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for name, g in grads.items():
            if name not in self.m:
                self.m[name] = np.zeros_like(params[name])
                self.v[name] = np.zeros_like(params[name])
            m = self.m[name] = b1 * self.m[name] + (1 - b1) * g
            v = self.v[name] = b2 * self.v[name] + (1 - b2) * (g * g)
            m_hat = m / (1 - b1 ** self.t)
            v_hat = v / (1 - b2 ** self.t)
            params[name] = params[name] - self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)
