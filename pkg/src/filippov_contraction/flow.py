"""Event-located fixed-step integration of planar Filippov solutions.

States are advanced in lockstep on a uniform time grid.  Within a grid step a
state follows one of three fields, encoded as an integer mode:

    +1  branch f+        -1  branch f-        0  sliding field on the surface

A full step is attempted for every state first; only the states whose step
crosses the surface (or, while sliding, leaves the attracting configuration)
are re-integrated with per-state sub-steps and bisection.  The whole engine is
vectorized over a batch axis, and a single trajectory is a batch of one.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import Degenerate, NotAttracting, OffSurfaceError, StepTooLarge, ZenoGuard
from .geometry import RegionSign, SystemDef

PLUS, SLIDE, MINUS = 1, 0, -1

# cap on events resolved for one state inside one grid step
MAX_EVENTS_PER_STEP = 16
# slide-exit times are bisected to this absolute width
EXIT_TIME_TOL = 1e-12
DEGENERATE_GAP = 1e-14


class FlowMode(enum.Enum):
    SMOOTH_PLUS = "SmoothPlus"
    SMOOTH_MINUS = "SmoothMinus"
    SLIDING = "Sliding"
    REPELLING_DEPARTURE = "RepellingDeparture"


class EventKind(enum.Enum):
    CROSSING = "Crossing"
    SLIDE_ENTRY = "SlideEntry"
    SLIDE_EXIT = "SlideExit"
    DEPARTURE = "Departure"


_MODE_OF_CODE = {PLUS: FlowMode.SMOOTH_PLUS, MINUS: FlowMode.SMOOTH_MINUS, SLIDE: FlowMode.SLIDING}


@dataclass(frozen=True)
class SwitchEvent:
    time: float
    state: tuple
    kind: EventKind


@dataclass(frozen=True)
class IntegratorCfg:
    method: str = "RK4"
    dt: float = 2.0 * math.pi / 2000
    event_tol: float = 1e-10
    bisect_iters: int = 60
    dwell_min: float | None = None
    depart_side: RegionSign = RegionSign.PLUS

    def __post_init__(self):
        if self.method not in ("RK4", "Euler"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if not self.event_tol > 0:
            raise ValueError("event_tol must be > 0")
        if self.bisect_iters < 20:
            raise ValueError("bisect_iters must be >= 20")
        if self.dwell_min is not None and self.dwell_min < 0:
            raise ValueError("dwell_min must be >= 0")
        side = RegionSign(self.depart_side)
        if side is RegionSign.ON_SURFACE:
            raise ValueError("depart_side must be PLUS or MINUS")
        object.__setattr__(self, "depart_side", side)

    @property
    def dwell(self) -> float:
        return self.dt / 2 if self.dwell_min is None else self.dwell_min


@dataclass
class Trajectory:
    """Sampled solution on the integration grid plus its event log."""

    t: np.ndarray
    x: np.ndarray
    mode_codes: np.ndarray
    events: list = field(default_factory=list)

    @property
    def modes(self):
        return [_MODE_OF_CODE[int(c)] for c in self.mode_codes]

    def __len__(self):
        return len(self.t)


# -- surface-normal quantities ------------------------------------------------


def _normal_components(sys, t, x, fields=None):
    fp, fm = sys.branches(t, x) if fields is None else fields
    g = sys.surface.grad_h(x)
    return np.sum(g * fp, axis=-1), np.sum(g * fm, axis=-1)


def _margin(sys, t, x):
    """Positive exactly when both branches point toward the surface."""
    cp, cm = _normal_components(sys, t, x)
    return np.minimum(-cp, cm)


def _require_on_surface(sys, x, tol):
    x = np.asarray(x, dtype=float)
    if abs(float(sys.surface.h(x))) > tol:
        raise OffSurfaceError(f"state {x.tolist()} is not on the switching surface")
    return x


def normal_components(sys: SystemDef, t, x, event_tol: float = 1e-10):
    """Return ``(c_minus, c_plus)`` with ``c = <grad h, f>``."""
    x = _require_on_surface(sys, x, event_tol)
    cp, cm = _normal_components(sys, t, x)
    return float(cm), float(cp)


def sliding_alpha(sys: SystemDef, t, x, event_tol: float = 1e-10) -> float:
    cm, cp = normal_components(sys, t, x, event_tol)
    if abs(cm - cp) < DEGENERATE_GAP:
        raise Degenerate(f"normal components coincide at t={t}")
    if not cp < 0 < cm:
        raise NotAttracting(f"c_plus={cp}, c_minus={cm} at t={t}")
    return cm / (cm - cp)


def sliding_field(sys: SystemDef, t, x, event_tol: float = 1e-10) -> np.ndarray:
    a = sliding_alpha(sys, t, x, event_tol)
    fp, fm = sys.branches(t, np.asarray(x, dtype=float))
    return (1.0 - a) * fm + a * fp


# -- vectorized engine --------------------------------------------------------


def _velocity(sys, t, x, mode):
    fp, fm = sys.branches(t, x)
    plus = mode == PLUS
    if plus.all():
        return fp
    v = np.where(plus[:, None], fp, fm)
    sliding = mode == SLIDE
    if sliding.any():
        cp, cm = _normal_components(sys, t, x, (fp, fm))
        gap = cm - cp
        ok = np.abs(gap) >= DEGENERATE_GAP
        a = np.where(ok, cm / np.where(ok, gap, 1.0), 0.5)
        fs = (1.0 - a)[:, None] * fm + a[:, None] * fp
        v = np.where(sliding[:, None], fs, v)
    return v


def _rk_step(sys, method, t, x, mode, h):
    """One explicit step of size ``h`` (scalar or per-state) from time ``t``."""
    hh = h[:, None] if np.ndim(h) else h
    k1 = _velocity(sys, t, x, mode)
    if method == "Euler":
        xn = x + hh * k1
    else:
        k2 = _velocity(sys, t + h / 2, x + hh / 2 * k1, mode)
        k3 = _velocity(sys, t + h / 2, x + hh / 2 * k2, mode)
        k4 = _velocity(sys, t + h, x + hh * k3, mode)
        xn = x + hh / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    sliding = mode == SLIDE
    if sliding.any():
        xn[sliding] = sys.surface.project(xn[sliding])
    return xn


def _flags(sys, tol, t_end, x0, x1, mode):
    """States whose tentative step needs event handling."""
    h0 = sys.surface.h(x0)
    h1 = sys.surface.h(x1)
    plus = (mode == PLUS) & (h1 <= np.where(h0 > tol, tol, -tol))
    minus = (mode == MINUS) & (h1 >= np.where(h0 < -tol, -tol, tol))
    out = plus | minus
    sliding = mode == SLIDE
    if sliding.any():
        out = out | (sliding & (_margin(sys, t_end, x1) <= 0))
    return out


def _locate(sys, cfg, tau, x, mode, H, x_end):
    """Bisect for the event fraction ``s`` of each step; returns ``(s, state)``."""
    m = len(tau)
    s = np.full(m, np.nan)
    xs = np.array(x_end, copy=True)
    tol = cfg.event_tol

    smooth = np.flatnonzero(mode != SLIDE)
    if smooth.size:
        sg = mode[smooth].astype(float)
        h_start = sg * sys.surface.h(x[smooth])
        h_end = sys.surface.h(x_end[smooth])
        at_start = h_start <= 0
        at_end = ~at_start & (np.abs(h_end) <= tol)
        s[smooth[at_start]] = 0.0
        xs[smooth[at_start]] = x[smooth[at_start]]
        s[smooth[at_end]] = 1.0
        todo = smooth[~at_start & ~at_end]
        lo = np.zeros(todo.size)
        hi = np.ones(todo.size)
        for _ in range(cfg.bisect_iters):
            if not todo.size:
                break
            mid = 0.5 * (lo + hi)
            xm = _rk_step(sys, cfg.method, tau[todo], x[todo], mode[todo], mid * H[todo])
            hm = sys.surface.h(xm)
            done = np.abs(hm) <= tol
            s[todo[done]] = mid[done]
            xs[todo[done]] = xm[done]
            above = mode[todo] * hm > 0
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
            keep = ~done
            todo, lo, hi = todo[keep], lo[keep], hi[keep]
        if todo.size:
            raise StepTooLarge(
                f"event bisection did not reach |h| <= {tol} at t={tau[todo[0]]}"
            )

    slide = np.flatnonzero(mode == SLIDE)
    if slide.size:
        at_start = _margin(sys, tau[slide], x[slide]) <= 0
        s[slide[at_start]] = 0.0
        xs[slide[at_start]] = x[slide[at_start]]
        todo = slide[~at_start]
        lo = np.zeros(todo.size)
        hi = np.ones(todo.size)
        for _ in range(cfg.bisect_iters):
            if not todo.size or np.all((hi - lo) * H[todo] <= EXIT_TIME_TOL):
                break
            mid = 0.5 * (lo + hi)
            xm = _rk_step(sys, cfg.method, tau[todo], x[todo], mode[todo], mid * H[todo])
            still = _margin(sys, tau[todo] + mid * H[todo], xm) > 0
            lo = np.where(still, mid, lo)
            hi = np.where(still, hi, mid)
        if todo.size:
            s[todo] = hi
            xs[todo] = _rk_step(sys, cfg.method, tau[todo], x[todo], mode[todo], hi * H[todo])
    return s, xs


def _classify(sys, cfg, t, x, mode):
    """New mode and event kind for states sitting on the surface after an event."""
    cp, cm = _normal_components(sys, t, x)
    new = np.empty(len(t), dtype=int)
    kinds = []
    depart = int(cfg.depart_side)
    for i in range(len(t)):
        if mode[i] != SLIDE:
            if cp[i] < 0 < cm[i]:
                new[i], kind = SLIDE, EventKind.SLIDE_ENTRY
            else:
                new[i], kind = -mode[i], EventKind.CROSSING
        elif cp[i] > 0 and cm[i] < 0:
            new[i], kind = depart, EventKind.DEPARTURE
        elif cp[i] >= 0 and cm[i] >= 0 and (cp[i] > 0 or cm[i] > 0):
            new[i], kind = PLUS, EventKind.SLIDE_EXIT
        elif cp[i] <= 0 and cm[i] <= 0 and (cp[i] < 0 or cm[i] < 0):
            new[i], kind = MINUS, EventKind.SLIDE_EXIT
        else:
            new[i], kind = depart, EventKind.DEPARTURE
        kinds.append(kind)
    return new, kinds


def _advance(sys, cfg, ta, tb, x, mode, last_event, log):
    """Advance a batch over one grid step ``[ta, tb]``; mutates ``last_event``/``log``."""
    H = tb - ta
    xn = _rk_step(sys, cfg.method, ta, x, mode, H)
    flagged = np.flatnonzero(_flags(sys, cfg.event_tol, tb, x, xn, mode))
    if not flagged.size:
        return xn, mode
    mode = mode.copy()
    tau = np.full(flagged.size, ta)
    xs = x[flagged].copy()
    ms = mode[flagged].copy()
    count = np.zeros(flagged.size, dtype=int)
    active = np.arange(flagged.size)
    while active.size:
        Hs = tb - tau[active]
        xe = _rk_step(sys, cfg.method, tau[active], xs[active], ms[active], Hs)
        hit = _flags(sys, cfg.event_tol, tb, xs[active], xe, ms[active])
        fin = active[~hit]
        xs[fin] = xe[~hit]
        tau[fin] = tb
        ev = active[hit]
        if not ev.size:
            break
        s, xev = _locate(sys, cfg, tau[ev], xs[ev], ms[ev], Hs[hit], xe[hit])
        t_ev = tau[ev] + s * Hs[hit]
        t_ev = np.where(s >= 1.0, tb, t_ev)
        xev = sys.surface.project(xev)
        new, kinds = _classify(sys, cfg, t_ev, xev, ms[ev])
        for j, i in enumerate(ev):
            g = flagged[i]
            if t_ev[j] - last_event[g] >= cfg.dwell:
                last_event[g] = t_ev[j]
                if log is not None:
                    log[g].append(SwitchEvent(float(t_ev[j]), tuple(map(float, xev[j])), kinds[j]))
        count[ev] += 1
        if count.max() > MAX_EVENTS_PER_STEP:
            raise ZenoGuard(f"more than {MAX_EVENTS_PER_STEP} events in step [{ta}, {tb}]")
        xs[ev] = xev
        ms[ev] = new
        tau[ev] = t_ev
        active = ev[t_ev < tb]
    xn[flagged] = xs
    mode[flagged] = ms
    return xn, mode


def _time_grid(t0, t1, dt):
    n = max(1, math.ceil((t1 - t0) / dt - 1e-9))
    times = t0 + (t1 - t0) * np.arange(n + 1) / n
    times[-1] = t1
    return times


def initial_modes(sys: SystemDef, cfg: IntegratorCfg, t, x) -> np.ndarray:
    """Mode codes for states at time ``t``.

    On the surface: strictly attracting -> sliding, transversal -> the side
    both fields point to, repelling or degenerate -> ``cfg.depart_side``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    hx = sys.surface.h(x)
    cp, cm = _normal_components(sys, t, x)
    on = np.abs(hx) <= cfg.event_tol
    modes = np.where(hx > 0, PLUS, MINUS)
    modes = np.where(on, int(cfg.depart_side), modes)
    modes = np.where(on & (cp > 0) & (cm > 0), PLUS, modes)
    modes = np.where(on & (cp < 0) & (cm < 0), MINUS, modes)
    modes = np.where(on & (cp < 0) & (cm > 0), SLIDE, modes)
    return modes.astype(int)


def flow_mode_at(sys: SystemDef, cfg: IntegratorCfg, t, x) -> FlowMode:
    """Flow mode of a single state, reporting repelling surface points explicitly."""
    x = np.asarray(x, dtype=float)
    if abs(float(sys.surface.h(x))) <= cfg.event_tol:
        cp, cm = _normal_components(sys, t, x)
        if cp > 0 and cm < 0:
            return FlowMode.REPELLING_DEPARTURE
    return _MODE_OF_CODE[int(initial_modes(sys, cfg, t, x)[0])]


def _mode_code(sys, cfg, t, x, mode):
    if mode is None:
        return int(initial_modes(sys, cfg, t, x)[0])
    mode = FlowMode(mode)
    if mode is FlowMode.REPELLING_DEPARTURE:
        return int(cfg.depart_side)
    return {v: k for k, v in _MODE_OF_CODE.items()}[mode]


def step(sys: SystemDef, cfg: IntegratorCfg, t, x, mode=None):
    """Advance one state by ``cfg.dt``; returns ``(t', x', mode', events)``."""
    x0 = np.asarray(x, dtype=float).reshape(1, 2)
    code = np.array([_mode_code(sys, cfg, t, x0[0], mode)])
    log = [[]]
    xn, mn = _advance(sys, cfg, t, t + cfg.dt, x0, code, np.array([-np.inf]), log)
    return t + cfg.dt, xn[0], _MODE_OF_CODE[int(mn[0])], log[0]


def propagate(sys: SystemDef, cfg: IntegratorCfg, x0, t0, t1, modes=None):
    """Integrate a batch of states from ``t0`` to ``t1``; returns ``(x, modes)``."""
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")
    x = np.array(np.atleast_2d(x0), dtype=float)
    mode = initial_modes(sys, cfg, t0, x) if modes is None else np.array(modes, dtype=int)
    last = np.full(len(x), -np.inf)
    times = _time_grid(t0, t1, cfg.dt)
    for k in range(len(times) - 1):
        x, mode = _advance(sys, cfg, times[k], times[k + 1], x, mode, last, None)
    return x, mode


def simulate(sys: SystemDef, cfg: IntegratorCfg, x0, t0: float, t1: float) -> Trajectory:
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")
    times = _time_grid(t0, t1, cfg.dt)
    x = np.asarray(x0, dtype=float).reshape(1, 2).copy()
    mode = initial_modes(sys, cfg, t0, x)
    xs = np.empty((len(times), 2))
    codes = np.empty(len(times), dtype=int)
    xs[0], codes[0] = x[0], mode[0]
    last = np.array([-np.inf])
    log = [[]]
    for k in range(len(times) - 1):
        x, mode = _advance(sys, cfg, times[k], times[k + 1], x, mode, last, log)
        xs[k + 1], codes[k + 1] = x[0], mode[0]
    return Trajectory(t=times, x=xs, mode_codes=codes, events=log[0])


# -- export -------------------------------------------------------------------


def _fmt(v) -> str:
    return format(float(v), ".17g")


def write_trajectory_csv(traj: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x1", "x2", "mode"])
        for t, (a, b), c in zip(traj.t, traj.x, traj.mode_codes):
            w.writerow([_fmt(t), _fmt(a), _fmt(b), _MODE_OF_CODE[int(c)].value])


def write_events_csv(events, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "t", "x1", "x2", "kind"])
        for k, ev in enumerate(events):
            w.writerow([k, _fmt(ev.time), _fmt(ev.state[0]), _fmt(ev.state[1]), ev.kind.value])
