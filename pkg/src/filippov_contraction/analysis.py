"""Trajectory-pair contraction, the comparison bound with jumps, and the time-T map.

The periodic orbit is found by plain fixed-point iteration of the time-T map
``x -> phi(T, x)``; its contraction factor is estimated from successive
difference ratios, which stay meaningful through switching events.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyWindow, NoConvergence, ZeroDistance
from .flow import IntegratorCfg, Trajectory, propagate, simulate
from .geometry import SystemDef
from .weight import WeightSpec, weight_value

WORKERS_ENV = "FILIPPOV_WORKERS"
# Poincare sweeps are split into chunks of this many starts regardless of the
# worker count, so output bytes do not depend on how the work is scheduled.
POINCARE_CHUNK = 1024


@dataclass
class PairSeries:
    times: np.ndarray
    euclid_dist: np.ndarray
    weighted_dist: np.ndarray
    merged_events: np.ndarray
    traj_a: Trajectory | None = None
    traj_b: Trajectory | None = None
    decay_constant: float = 1.0

    def has_sliding(self) -> bool:
        return any(
            tr is not None and bool(np.any(tr.mode_codes == 0)) for tr in (self.traj_a, self.traj_b)
        )


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r2: float
    fit_window: tuple


@dataclass(frozen=True)
class ComparisonCheck:
    passes: bool
    max_violation: float
    window_start: float


@dataclass
class OrbitResult:
    fixed_point: np.ndarray
    iterates: np.ndarray
    residual: float
    q_est: float
    orbit_samples: Trajectory | None = None
    diffs: np.ndarray = field(default_factory=lambda: np.empty(0))

    def to_dict(self, orbit_csv_path=None):
        return {
            "fixed_point": [float(v) for v in self.fixed_point],
            "residual": float(self.residual),
            "q_est": float(self.q_est),
            "iterates": [[float(a), float(b)] for a, b in self.iterates],
            "orbit_csv_path": orbit_csv_path,
        }


def euclidean_decay_constant(w: WeightSpec) -> float:
    """C = exp(2M) with M = sup|W| = delta for the -delta*sigma family."""
    return math.exp(2.0 * w.bound)


def pair_series(sys: SystemDef, w: WeightSpec, cfg: IntegratorCfg, x0a, x0b,
                horizon: float, t0: float = 0.0) -> PairSeries:
    x0a = np.asarray(x0a, dtype=float)
    x0b = np.asarray(x0b, dtype=float)
    if np.array_equal(x0a, x0b):
        raise ValueError("pair starts must differ")
    ta = simulate(sys, cfg, x0a, t0, t0 + horizon)
    tb = simulate(sys, cfg, x0b, t0, t0 + horizon)
    d = np.linalg.norm(ta.x - tb.x, axis=-1)
    weighted = np.exp(weight_value(w, ta.t, ta.x)) * d
    merged = np.unique([e.time for e in ta.events] + [e.time for e in tb.events])
    return PairSeries(ta.t, d, weighted, merged, ta, tb, euclidean_decay_constant(w))


def fit_decay_rate(series: PairSeries, window=None, which: str = "euclid") -> DecayFit:
    """Least-squares line through ``log(dist)`` against time over ``window``."""
    dist = series.euclid_dist if which == "euclid" else series.weighted_dist
    t = series.times
    lo, hi = (-np.inf, np.inf) if window is None else window
    sel = (t >= lo) & (t <= hi)
    if sel.sum() < 2:
        raise EmptyWindow(f"window {window} holds fewer than two samples")
    if np.any(dist[sel] <= 0):
        raise ZeroDistance("distance must be positive inside the fit window")
    tt, y = t[sel], np.log(dist[sel])
    slope, intercept = np.polyfit(tt, y, 1)
    ss_res = float(np.sum((y - (slope * tt + intercept)) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    return DecayFit(float(slope), float(intercept), r2, (float(tt[0]), float(tt[-1])))


def comparison_bound(A0: float, nu: float, jumps, t: float) -> float:
    """A0 * exp(-nu t) * prod(gamma_k for t_k <= t)."""
    if A0 < 0:
        raise ValueError("A0 must be >= 0")
    prod = 1.0
    for tk, gk in jumps:
        if not 0 < gk <= 1:
            raise ValueError(f"jump factor {gk} outside (0, 1]")
        if tk <= t:
            prod *= gk
    return A0 * math.exp(-nu * t) * prod


def comparison_violation(times, values, nu: float, jumps, rtol: float = 1e-9) -> float:
    """Largest relative excess of ``values`` over the comparison bound; <= 0 means no violation.

    The bound is anchored at the first sample, and ``jumps`` are ``(t_k, gamma_k)``
    pairs with ``t_k`` on the same clock as ``times``.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    t0, a0 = times[0], values[0]
    jt = np.array([j[0] for j in jumps], dtype=float)
    jg = np.array([j[1] for j in jumps], dtype=float)
    if np.any((jg <= 0) | (jg > 1)):
        raise ValueError("jump factors must lie in (0, 1]")
    order = np.argsort(jt, kind="stable")
    jt, log_g = jt[order], np.log(jg[order])
    cum = np.concatenate([[0.0], np.cumsum(log_g)])
    # jumps strictly after the anchor and at or before each sample
    n_before_anchor = np.searchsorted(jt, t0, side="right")
    n_upto = np.searchsorted(jt, times, side="right")
    log_prod = cum[n_upto] - cum[n_before_anchor]
    bound = a0 * np.exp(-nu * (times - t0) + log_prod)
    excess = (values - bound * (1.0 + rtol)) / np.where(bound > 0, bound, 1.0)
    return float(np.max(excess))


def verify_comparison(series: PairSeries, nu: float, eps_jump: float,
                      t_start: float | None = None, rtol: float = 1e-9) -> ComparisonCheck:
    """Check the weighted distance against the jump-comparison bound from ``t_start`` on.

    Every merged switching time of either trajectory contributes a factor
    exp(-eps_jump).
    """
    t = series.times
    sel = np.ones(len(t), dtype=bool) if t_start is None else t >= t_start
    gamma = math.exp(-eps_jump)
    jumps = [(tk, gamma) for tk in series.merged_events]
    v = comparison_violation(t[sel], series.weighted_dist[sel], nu, jumps, rtol)
    return ComparisonCheck(bool(v <= 0.0), max(v, 0.0), float(t[sel][0]))


def time_T_map(sys: SystemDef, cfg: IntegratorCfg, x0) -> np.ndarray:
    x, _ = propagate(sys, cfg, np.asarray(x0, dtype=float), 0.0, sys.period)
    return x[0]


def find_periodic_orbit(sys: SystemDef, cfg: IntegratorCfg, x_init, tol: float = 1e-8,
                        max_iter: int = 100) -> OrbitResult:
    if not tol > 0:
        raise ValueError("tol must be > 0")
    xs = [np.asarray(x_init, dtype=float)]
    diffs = []
    for _ in range(max_iter):
        nxt = time_T_map(sys, cfg, xs[-1])
        diffs.append(float(np.linalg.norm(nxt - xs[-1])))
        xs.append(nxt)
        if diffs[-1] <= tol:
            break
    else:
        raise NoConvergence(max_iter, np.array(xs))
    x_star = xs[-1]
    q = diffs[-1] / diffs[-2] if len(diffs) > 1 and diffs[-2] > 0 else float("nan")
    orbit = simulate(sys, cfg, x_star, 0.0, sys.period)
    residual = float(np.linalg.norm(orbit.x[-1] - x_star))
    return OrbitResult(x_star, np.array(xs), residual, q, orbit, np.array(diffs))


def _poincare_chunk(args):
    sys, cfg, starts, k_iters = args
    out = np.empty((len(starts), k_iters + 1, 2))
    out[:, 0] = starts
    x, modes = np.array(starts, dtype=float), None
    for k in range(1, k_iters + 1):
        x, modes = propagate(sys, cfg, x, 0.0, sys.period, modes)
        out[:, k] = x
    return out


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return max(1, os.cpu_count() or 1)


def poincare_grid(sys: SystemDef, cfg: IntegratorCfg, starts, k_iters: int,
                  workers: int | None = None, chunk: int = POINCARE_CHUNK) -> np.ndarray:
    """Iterates ``phi(kT, x0)`` for ``k = 0..k_iters``; shape ``(n_starts, k_iters + 1, 2)``."""
    if k_iters < 0:
        raise ValueError("k_iters must be >= 0")
    starts = np.atleast_2d(np.asarray(starts, dtype=float))
    if k_iters == 0:
        return starts[:, None, :].copy()
    jobs = [(sys, cfg, starts[i:i + chunk], k_iters) for i in range(0, len(starts), chunk)]
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(jobs) == 1:
        parts = [_poincare_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            parts = list(pool.map(_poincare_chunk, jobs))
    return np.concatenate(parts, axis=0)


def grid_starts(box, n1: int, n2: int) -> np.ndarray:
    """Row-major ``n1 x n2`` grid over ``box = (x1_min, x1_max, x2_min, x2_max)``."""
    a = np.linspace(box[0], box[1], n1)
    b = np.linspace(box[2], box[3], n2)
    g1, g2 = np.meshgrid(a, b, indexing="ij")
    return np.stack([g1.ravel(), g2.ravel()], axis=-1)


def point_spread(points) -> float:
    """Diameter (largest pairwise distance) of a point cloud."""
    p = np.asarray(points, dtype=float)
    best = 0.0
    for i in range(0, len(p), 512):
        block = p[i:i + 512]
        d = np.sqrt(((block[:, None, :] - p[None, :, :]) ** 2).sum(-1))
        best = max(best, float(d.max()))
    return best


def _fmt(v) -> str:
    return format(float(v), ".17g")


def write_pair_csv(series: PairSeries, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "dist_euclid", "dist_weighted"])
        for row in zip(series.times, series.euclid_dist, series.weighted_dist):
            w.writerow([_fmt(v) for v in row])


def write_poincare_csv(iterates, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["start_idx", "k", "x1", "x2"])
        for i, seq in enumerate(iterates):
            for k, (a, b) in enumerate(seq):
                w.writerow([i, k, _fmt(a), _fmt(b)])


def write_orbit_json(result: OrbitResult, path, orbit_csv_path=None) -> None:
    with open(path, "w") as fh:
        json.dump(result.to_dict(orbit_csv_path), fh, indent=2)
        fh.write("\n")
