"""Grid verification of the weighted contraction conditions.

Each check evaluates the left-hand side of one inequality on a tensor grid and
reduces it to a :class:`ContractionReport` (supremum, infimum and the first
grid point attaining the supremum in lexicographic ``(t, x1, x2)`` order).
The grid supremum is a measurement, not a certificate.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .geometry import SURFACE_TOL, RegionSign, SystemDef
from .weight import WeightSpec, jump_limits, orbital_derivative

# step for the tangential derivative of the sliding coefficient
_ALPHA_FD_STEP = 1e-6


@dataclass(frozen=True)
class GridSpec:
    t_range: tuple
    t_count: int
    x1_range: tuple
    x1_count: int
    x2_range: tuple
    x2_count: int

    def __post_init__(self):
        for name in ("t", "x1", "x2"):
            lo, hi = getattr(self, f"{name}_range")
            if getattr(self, f"{name}_count") < 2:
                raise ValueError(f"{name}_count must be >= 2")
            if not hi > lo:
                raise ValueError(f"{name}_range must be nondegenerate")

    def axes(self):
        return (
            np.linspace(*self.t_range, self.t_count),
            np.linspace(*self.x1_range, self.x1_count),
            np.linspace(*self.x2_range, self.x2_count),
        )

    def to_dict(self):
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


@dataclass
class ContractionReport:
    quantity: str
    sup_value: float
    inf_value: float
    witness_sup: dict
    passes: bool
    nu_used: float | None
    threshold: float
    skipped_count: int = 0
    grid: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "quantity": self.quantity,
            "nu_used": self.nu_used,
            "threshold": self.threshold,
            "sup_value": self.sup_value,
            "inf_value": self.inf_value,
            "witness_sup": self.witness_sup,
            "passes": self.passes,
            "skipped_count": self.skipped_count,
            "grid": self.grid,
            "details": self.details,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def default_nu(sys: SystemDef) -> float:
    return 0.5 * min(sys.mu, sys.alpha)


def sym_lambda_max(m):
    """Largest eigenvalue of the symmetric part of 2x2 matrices ``(..., 2, 2)``."""
    m = np.asarray(m, dtype=float)
    a, d = m[..., 0, 0], m[..., 1, 1]
    b = 0.5 * (m[..., 0, 1] + m[..., 1, 0])
    out = 0.5 * (a + d) + np.hypot(0.5 * (a - d), b)
    return out if out.ndim else float(out)


def clarke_lambda_max(sys: SystemDef, t, x, surface_tol: float = SURFACE_TOL):
    """Max symmetric-part eigenvalue over the Clarke Jacobian at ``(t, x)``.

    On the surface the generalized Jacobian is the segment between the two
    branch Jacobians; lambda_max of the symmetric part is convex in the
    matrix, so its maximum over the segment sits at an endpoint.
    """
    x = np.asarray(x, dtype=float)
    hx = sys.surface.h(x)
    lp = sym_lambda_max(sys.branch_jacobian(t, x, RegionSign.PLUS))
    lm = sym_lambda_max(sys.branch_jacobian(t, x, RegionSign.MINUS))
    out = np.where(hx > surface_tol, lp, np.where(hx < -surface_tol, lm, np.maximum(lp, lm)))
    return out if out.ndim else float(out)


def _alpha_coeff(sys, t, x):
    fp, fm = sys.branches(t, x)
    g = sys.surface.grad_h(x)
    cp, cm = np.sum(g * fp, -1), np.sum(g * fm, -1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return cm / (cm - cp)


def sliding_tangent_rate(sys: SystemDef, t, x):
    """Symmetric-part eigenvalue of the sliding Jacobian restricted to the tangent line.

    D f_slide = (1 - a) Df- + a Df+ + (f+ - f-) grad(a)^T; only its tangential
    quadratic form matters for motion confined to the surface.  The term with
    grad(a) is evaluated by a central difference along the tangent.
    """
    x = np.asarray(x, dtype=float)
    n = sys.surface.normal(x)
    tau = np.stack([-n[..., 1], n[..., 0]], axis=-1)
    fp, fm = sys.branches(t, x)
    a = _alpha_coeff(sys, t, x)
    jp = sys.branch_jacobian(t, x, RegionSign.PLUS)
    jm = sys.branch_jacobian(t, x, RegionSign.MINUS)
    blend = (1.0 - a)[..., None, None] * jm + a[..., None, None] * jp
    quad = np.einsum("...i,...ij,...j->...", tau, blend, tau)
    jump_t = np.sum(tau * (fp - fm), -1)
    step = _ALPHA_FD_STEP * tau
    da = (_alpha_coeff(sys, t, x + step) - _alpha_coeff(sys, t, x - step)) / (2 * _ALPHA_FD_STEP)
    with np.errstate(invalid="ignore"):
        out = quad + np.where(jump_t == 0.0, 0.0, jump_t * da)
    return out if out.ndim else float(out)


def _reduce(values, valid, coords):
    """Sup/inf over valid entries with a lexicographic-first witness."""
    if not valid.any():
        return float("nan"), float("nan"), None
    masked = np.where(valid, values, -np.inf)
    flat = int(np.argmax(masked))
    idx = np.unravel_index(flat, values.shape)
    sup = float(values[idx])
    inf = float(np.min(np.where(valid, values, np.inf)))
    witness = {k: float(c[idx]) for k, c in coords.items()}
    return sup, inf, witness


def check_A2(sys: SystemDef, w: WeightSpec, grid: GridSpec, nu: float | None = None,
             surface_tol: float = SURFACE_TOL) -> ContractionReport:
    """Smooth-region condition W' + lambda_max^Cl <= -nu; the surface band is skipped."""
    nu = default_nu(sys) if nu is None else nu
    t, x1, x2 = np.meshgrid(*grid.axes(), indexing="ij")
    x = np.stack([x1, x2], axis=-1)
    hx = sys.surface.h(x)
    valid = np.abs(hx) > surface_tol
    fp, fm = sys.branches(t, x)
    v = np.where((hx > 0)[..., None], fp, fm)
    value = orbital_derivative(w, t, x, v) + clarke_lambda_max(sys, t, x, surface_tol)
    sup, inf, witness = _reduce(value, valid, {"t": t, "x1": x1, "x2": x2})
    return ContractionReport(
        quantity="A2: W' + lambda_max_Cl",
        sup_value=sup, inf_value=inf, witness_sup=witness,
        passes=bool(sup <= -nu), nu_used=nu, threshold=-nu,
        skipped_count=int((~valid).sum()), grid=grid.to_dict(),
        details={"delta": w.delta, "eps": w.eps,
                 "sufficient_bound": w.delta * w.c_sigma * (sys.mu * w.eps + sys.forcing_amp)},
    )


def _surface_points(sys, t_grid, x2_grid):
    t, x2 = np.meshgrid(np.asarray(t_grid, float), np.asarray(x2_grid, float), indexing="ij")
    x = sys.surface.project(np.stack([np.zeros_like(x2), x2], axis=-1))
    return t, x


def check_A3(sys: SystemDef, w: WeightSpec, t_grid, x2_grid, eps_jump: float) -> ContractionReport:
    """Jump inequality exp(W+)|f+| <= exp(W-)|f-| exp(-eps_jump) on the surface."""
    t, x = _surface_points(sys, t_grid, x2_grid)
    fp, fm = sys.branches(t, x)
    np_, nm = np.linalg.norm(fp, axis=-1), np.linalg.norm(fm, axis=-1)
    w_plus, w_minus = jump_limits(w)
    lhs = np.exp(w_plus) * np_
    rhs = np.exp(w_minus) * nm
    value = lhs - rhs * np.exp(-eps_jump)
    valid = nm > 0
    ratio = np.where(valid, lhs / np.where(valid, rhs, 1.0), np.nan)
    sup, inf, witness = _reduce(value, valid, {"t": t, "x1": x[..., 0], "x2": x[..., 1]})
    return ContractionReport(
        quantity="A3: exp(W+)|f+| - exp(W-)|f-| exp(-eps_jump)",
        sup_value=sup, inf_value=inf, witness_sup=witness,
        passes=bool(sup <= 0.0), nu_used=None, threshold=0.0,
        skipped_count=int((~valid).sum()),
        grid={"t_count": int(t.shape[0]), "x2_count": int(t.shape[1])},
        details={"eps_jump": eps_jump, "W_plus": w_plus, "W_minus": w_minus,
                 "ratio_min": float(np.nanmin(ratio)) if valid.any() else None,
                 "ratio_max": float(np.nanmax(ratio)) if valid.any() else None},
    )


def jump_ratios(sys: SystemDef, w: WeightSpec, t_grid, x2_grid):
    """exp(W+)|f+| / (exp(W-)|f-|) on surface grid points; NaN where |f-| = 0."""
    t, x = _surface_points(sys, t_grid, x2_grid)
    fp, fm = sys.branches(t, x)
    w_plus, w_minus = jump_limits(w)
    lhs = np.exp(w_plus) * np.linalg.norm(fp, axis=-1)
    rhs = np.exp(w_minus) * np.linalg.norm(fm, axis=-1)
    return np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), np.nan)


def check_A4(sys: SystemDef, w: WeightSpec, t_grid, x2_grid, nu: float | None = None) -> ContractionReport:
    """Sliding condition W'(along f_slide) + tangential lambda_max <= -nu at attracting points."""
    nu = default_nu(sys) if nu is None else nu
    t, x = _surface_points(sys, t_grid, x2_grid)
    fp, fm = sys.branches(t, x)
    g = sys.surface.grad_h(x)
    cp, cm = np.sum(g * fp, -1), np.sum(g * fm, -1)
    valid = (cp < 0) & (cm > 0)
    a = np.where(valid, cm / np.where(valid, cm - cp, 1.0), 0.5)
    fs = (1.0 - a)[..., None] * fm + a[..., None] * fp
    rate = np.where(valid, sliding_tangent_rate(sys, t, x), np.nan)
    value = orbital_derivative(w, t, x, fs) + rate
    sup, inf, witness = _reduce(value, valid, {"t": t, "x1": x[..., 0], "x2": x[..., 1]})
    return ContractionReport(
        quantity="A4: W'(f_slide) + lambda_max(S_slide)",
        sup_value=sup, inf_value=inf, witness_sup=witness,
        passes=bool(sup <= -nu), nu_used=nu, threshold=-nu,
        skipped_count=int((~valid).sum()),
        grid={"t_count": int(t.shape[0]), "x2_count": int(t.shape[1])},
    )


def check_A5(sys: SystemDef, rect, t_grid, boundary_count: int = 41) -> ContractionReport:
    """Strict inward flow on the boundary of ``rect = (x1_min, x1_max, x2_min, x2_max)``.

    On the surface either branch may act, so the worse of the two is used.
    """
    x1_min, x1_max, x2_min, x2_max = map(float, rect)
    if not (x1_max > x1_min and x2_max > x2_min):
        raise ValueError("rectangle must be nondegenerate")
    t_grid = np.asarray(t_grid, dtype=float)
    s1 = np.linspace(x1_min, x1_max, boundary_count)
    s2 = np.linspace(x2_min, x2_max, boundary_count)
    faces = {
        "x1_min": (np.stack([np.full_like(s2, x1_min), s2], -1), np.array([-1.0, 0.0])),
        "x1_max": (np.stack([np.full_like(s2, x1_max), s2], -1), np.array([1.0, 0.0])),
        "x2_min": (np.stack([s1, np.full_like(s1, x2_min)], -1), np.array([0.0, -1.0])),
        "x2_max": (np.stack([s1, np.full_like(s1, x2_max)], -1), np.array([0.0, 1.0])),
    }
    per_face = {}
    for name, (pts, normal) in faces.items():
        t, idx = np.meshgrid(t_grid, np.arange(len(pts)), indexing="ij")
        x = pts[idx]
        fp, fm = sys.branches(t, x)
        hx = sys.surface.h(x)
        op, om = fp @ normal, fm @ normal
        value = np.where(hx > SURFACE_TOL, op, np.where(hx < -SURFACE_TOL, om, np.maximum(op, om)))
        per_face[name] = _reduce(value, np.ones(value.shape, dtype=bool),
                                 {"t": t, "x1": x[..., 0], "x2": x[..., 1]})
    worst = max(per_face, key=lambda k: per_face[k][0])
    sup, _, witness = per_face[worst]
    inf = min(v[1] for v in per_face.values())
    face_sup = {k: v[0] for k, v in per_face.items()}
    return ContractionReport(
        quantity="A5: outward normal velocity on boundary of K",
        sup_value=sup, inf_value=inf, witness_sup=witness,
        passes=bool(sup < 0.0), nu_used=None, threshold=0.0,
        grid={"t_count": int(len(t_grid)), "boundary_count": int(boundary_count),
              "rect": [x1_min, x1_max, x2_min, x2_max]},
        details={"face_sup": face_sup},
    )
