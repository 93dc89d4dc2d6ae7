"""Planar piecewise-smooth system: branch fields, switching surface and region logic.

The built-in system is the forced linear pair

    f+(t, x) = (-mu*x1 + A*sin t, -alpha*x2)    on h(x) > 0
    f-(t, x) = (-mu*x1 - A*sin t, -alpha*x2)    on h(x) < 0

with h(x) = x1.  Every evaluator accepts states of shape ``(..., 2)`` so the
same code serves single points, grids and integrator batches.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import OffSurfaceError

SURFACE_TOL = 1e-9


class RegionSign(enum.IntEnum):
    MINUS = -1
    ON_SURFACE = 0
    PLUS = 1


@dataclass(frozen=True)
class SwitchingSurface:
    """Codimension-one surface ``{h(x) = 0}``.

    ``h`` maps ``(..., 2) -> (...)`` and ``grad_h`` maps ``(..., 2) -> (..., 2)``.
    """

    h: Callable[[np.ndarray], np.ndarray]
    grad_h: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"

    def normal(self, x):
        g = np.asarray(self.grad_h(np.asarray(x, dtype=float)), dtype=float)
        return g / np.linalg.norm(g, axis=-1, keepdims=True)

    def project(self, x, iters=3):
        """Pull states onto the surface with a few Newton steps along grad h."""
        x = np.array(x, dtype=float)
        for _ in range(iters):
            g = self.grad_h(x)
            x = x - (self.h(x) / np.sum(g * g, axis=-1))[..., None] * g
        return x


def _h_x1(x):
    return np.asarray(x)[..., 0]


def _grad_x1(x):
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    g[..., 0] = 1.0
    return g


X1_SURFACE = SwitchingSurface(h=_h_x1, grad_h=_grad_x1, name="x1")


@dataclass(frozen=True)
class SystemDef:
    """Parameters of the forced piecewise-linear planar system.

    Subclasses may override :meth:`branches` and :meth:`branch_jacobian` to
    supply other fields; everything downstream goes through these two methods.
    """

    mu: float
    alpha: float
    forcing_amp: float = 1.0
    period: float = 2.0 * math.pi
    surface: SwitchingSurface = field(default=X1_SURFACE)

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("mu must be > 0")
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if not self.period > 0:
            raise ValueError("period must be > 0")
        if not self.forcing_amp >= 0:
            raise ValueError("forcing_amp must be >= 0")

    def branches(self, t, x):
        """Return ``(f_plus, f_minus)`` at time(s) ``t`` and states ``x``."""
        x = np.asarray(x, dtype=float)
        s = self.forcing_amp * np.sin(t)
        d1 = -self.mu * x[..., 0]
        d2 = -self.alpha * x[..., 1]
        p1, m1 = d1 + s, d1 - s
        shape = np.broadcast_shapes(np.shape(p1), np.shape(d2)) + (2,)
        fp = np.empty(shape)
        fm = np.empty(shape)
        fp[..., 0] = p1
        fm[..., 0] = m1
        fp[..., 1] = d2
        fm[..., 1] = d2
        return fp, fm

    def branch_jacobian(self, t, x, side):
        """Spatial Jacobian of the selected branch, shape ``(..., 2, 2)``."""
        x = np.asarray(x, dtype=float)
        jac = np.zeros(x.shape[:-1] + (2, 2))
        jac[..., 0, 0] = -self.mu
        jac[..., 1, 1] = -self.alpha
        return jac


def classify_region(sys: SystemDef, x, surface_tol: float = SURFACE_TOL) -> RegionSign:
    if not surface_tol > 0:
        raise ValueError("surface_tol must be > 0")
    hx = float(sys.surface.h(np.asarray(x, dtype=float)))
    if hx > surface_tol:
        return RegionSign.PLUS
    if hx < -surface_tol:
        return RegionSign.MINUS
    return RegionSign.ON_SURFACE


def _check_side(side):
    side = RegionSign(side)
    if side is RegionSign.ON_SURFACE:
        raise ValueError("side must be PLUS or MINUS")
    return side


def eval_side(sys: SystemDef, t, x, side) -> np.ndarray:
    """Closed-form branch field; defined everywhere, not only on its own side."""
    fp, fm = sys.branches(t, x)
    return fp if _check_side(side) is RegionSign.PLUS else fm


def side_jacobian(sys: SystemDef, t, x, side) -> np.ndarray:
    return sys.branch_jacobian(t, x, _check_side(side))


def filippov_hull(sys: SystemDef, t, x, surface_tol: float = SURFACE_TOL):
    """Endpoints ``(f_minus, f_plus)`` of the Filippov segment at a surface point."""
    x = np.asarray(x, dtype=float)
    if abs(float(sys.surface.h(x))) > surface_tol:
        raise OffSurfaceError(f"state {x.tolist()} is not on the switching surface")
    fp, fm = sys.branches(t, x)
    return fm, fp
