"""Weight W(t, x) = -delta * sigma(x1) and its derivatives.

sigma is the sinusoidal C^1 blend from 0 (x1 <= -eps) to 1 (x1 >= eps), so
sup |sigma'| = 1/eps, attained at x1 = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class WeightSpec:
    delta: float
    eps: float

    def __post_init__(self):
        if not self.delta >= 0:
            raise ValueError("delta must be >= 0")
        if not self.eps > 0:
            raise ValueError("eps must be > 0")

    @property
    def c_sigma(self) -> float:
        return 1.0 / self.eps

    @property
    def bound(self) -> float:
        """sup |W| over the state space."""
        return self.delta


def sigma(x1, eps):
    x1 = np.asarray(x1, dtype=float)
    u = np.clip(x1 / eps, -1.0, 1.0)
    inner = 0.5 * (1.0 + u + np.sin(np.pi * u) / np.pi)
    out = np.where(x1 <= -eps, 0.0, np.where(x1 >= eps, 1.0, inner))
    return out if out.ndim else float(out)


def sigma_prime(x1, eps):
    x1 = np.asarray(x1, dtype=float)
    inside = np.abs(x1) < eps
    u = np.where(inside, x1 / eps, 0.0)
    out = np.where(inside, (1.0 + np.cos(np.pi * u)) / (2.0 * eps), 0.0)
    return out if out.ndim else float(out)


def weight_value(w: WeightSpec, t, x):
    x = np.asarray(x, dtype=float)
    return -w.delta * sigma(x[..., 0], w.eps)


def weight_gradient(w: WeightSpec, t, x):
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    g[..., 0] = -w.delta * sigma_prime(x[..., 0], w.eps)
    return g


def orbital_derivative(w: WeightSpec, t, x, v):
    """dW/dt along velocity ``v``; W has no explicit time dependence."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    out = -w.delta * sigma_prime(x[..., 0], w.eps) * v[..., 0]
    return out if np.ndim(out) else float(out)


def jump_limits(w: WeightSpec):
    """One-sided weight values ``(W_plus, W_minus)`` used for the jump inequality.

    These are the plateau values of the regularized weight, i.e. the
    discontinuous weight that the smooth blend approximates.
    """
    return -w.delta, 0.0
