"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 configuration, 3 numerical failure,
4 verification ran but an inequality failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, contraction, flow
from .errors import ConfigError, FilippovError
from .scenario import Scenario, load_scenario

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3, 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _pair(text):
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}") from None
    return a, b


def _grid(text):
    try:
        n, m = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NxM, got {text!r}") from None
    if n < 1 or m < 1:
        raise argparse.ArgumentTypeError("grid sizes must be >= 1")
    return n, m


def _box(text):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        vals = ()
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("expected 'x1_min,x1_max,x2_min,x2_max'")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="filippov-contraction", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--scenario", required=True,
                        help="scenario JSON path or bundled name (forced2d, forced2d_safe)")
        sp.add_argument("--out", default=".", help="output directory")
        return sp

    sp = common("simulate", "one trajectory and its event log")
    sp.add_argument("--x0", type=_pair, default=(0.3, 1.0))
    sp.add_argument("--horizon", type=float, default=5.0, help="length in forcing periods")

    sp = common("pair", "distance series of two trajectories, decay fit, comparison bound")
    sp.add_argument("--x0", type=_pair, default=(0.1, 1.0))
    sp.add_argument("--x0b", type=_pair, default=(0.101, 1.001))
    sp.add_argument("--horizon", type=float, default=5.0, help="length in forcing periods")
    sp.add_argument("--nu", type=float, default=None)
    sp.add_argument("--eps-jump", type=float, default=0.0)
    sp.add_argument("--fit-start", type=float, default=2.0, help="fit window start in periods")

    sp = common("verify", "grid checks of the four contraction conditions")
    sp.add_argument("--nu", type=float, default=None)
    sp.add_argument("--eps-jump", type=float, default=None, help="default: weight delta")
    sp.add_argument("--grid", type=_grid, default=None, help="t x x1 sample counts for A2")

    sp = common("orbit", "periodic orbit by fixed-point iteration of the time-T map")
    sp.add_argument("--x0", type=_pair, default=(1.0, 1.0))
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--iters", type=int, default=100, help="maximum iterations")
    sp.add_argument("--random-starts", type=int, default=0,
                    help="extra seeded starts in the domain for a uniqueness check")

    sp = common("poincare", "time-T map iterates from a grid of starts")
    sp.add_argument("--grid", type=_grid, default=(60, 60))
    sp.add_argument("--iters", type=int, default=47)
    sp.add_argument("--box", type=_box, default=None, help="default: scenario domain")
    sp.add_argument("--workers", type=int, default=None,
                    help=f"worker processes (default: ${analysis.WORKERS_ENV} or CPU count)")
    return p


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _cmd_simulate(sc: Scenario, args, out: Path) -> int:
    T = sc.system.period
    traj = flow.simulate(sc.system, sc.integrator, args.x0, 0.0, args.horizon * T)
    flow.write_trajectory_csv(traj, out / "trajectory.csv")
    flow.write_events_csv(traj.events, out / "events.csv")
    return EXIT_OK


def _cmd_pair(sc: Scenario, args, out: Path) -> int:
    T = sc.system.period
    nu = contraction.default_nu(sc.system) if args.nu is None else args.nu
    series = analysis.pair_series(sc.system, sc.weight, sc.integrator, args.x0, args.x0b,
                                  args.horizon * T)
    start = args.fit_start * T
    fit = analysis.fit_decay_rate(series, (start, args.horizon * T))
    check = analysis.verify_comparison(series, nu, args.eps_jump, t_start=start)
    analysis.write_pair_csv(series, out / "pair.csv")
    _write_json(out / "pair_fit.json", {
        "slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2,
        "fit_window": list(fit.fit_window),
        "euclidean_decay_constant": series.decay_constant,
        "event_count": int(len(series.merged_events)),
        "comparison": {"nu": nu, "eps_jump": args.eps_jump, "passes": check.passes,
                       "max_violation": check.max_violation,
                       "window_start": check.window_start},
    })
    return EXIT_OK if check.passes else EXIT_VERIFY


def verify_reports(sc: Scenario, nu=None, eps_jump=None, grid=None) -> dict:
    sys_, w = sc.system, sc.weight
    nu = contraction.default_nu(sys_) if nu is None else nu
    eps_jump = w.delta if eps_jump is None else eps_jump
    T = sys_.period
    x1_lo, x1_hi, x2_lo, x2_hi = sc.domain
    if grid is None:
        # resolve the blend band with at least ten samples per eps
        n_x1 = max(201, math.ceil((x1_hi - x1_lo) / (w.eps / 10)) + 1)
        grid = (64, n_x1)
    a2_grid = contraction.GridSpec((0.0, T), grid[0], (x1_lo, x1_hi), grid[1], (x2_lo, x2_hi), 5)
    t_surf = np.linspace(0.0, T, 257)
    x2_surf = np.linspace(x2_lo, x2_hi, 61)
    reports = {
        "A2": contraction.check_A2(sys_, w, a2_grid, nu),
        "A3": contraction.check_A3(sys_, w, t_surf, x2_surf, eps_jump),
        "A4": contraction.check_A4(sys_, w, t_surf, x2_surf, nu),
        "A5": contraction.check_A5(sys_, sc.domain, t_surf),
    }
    return {
        "nu": nu,
        "eps_jump": eps_jump,
        "all_pass": all(r.passes for r in reports.values()),
        "checks": {k: r.to_dict() for k, r in reports.items()},
    }


def _cmd_verify(sc: Scenario, args, out: Path) -> int:
    report = verify_reports(sc, args.nu, args.eps_jump, args.grid)
    _write_json(out / "verify.json", report)
    return EXIT_OK if report["all_pass"] else EXIT_VERIFY


def _cmd_orbit(sc: Scenario, args, out: Path) -> int:
    res = analysis.find_periodic_orbit(sc.system, sc.integrator, args.x0, args.tol, args.iters)
    flow.write_trajectory_csv(res.orbit_samples, out / "orbit.csv")
    doc = res.to_dict("orbit.csv")
    if args.random_starts > 0:
        rng = np.random.default_rng(sc.seed)
        lo = np.array(sc.domain[0::2])
        hi = np.array(sc.domain[1::2])
        starts = lo + (hi - lo) * rng.random((args.random_starts, 2))
        others = [analysis.find_periodic_orbit(sc.system, sc.integrator, s, args.tol, args.iters)
                  for s in starts]
        doc["random_starts"] = [[float(v) for v in s] for s in starts]
        doc["max_fixed_point_gap"] = max(
            float(np.linalg.norm(o.fixed_point - res.fixed_point)) for o in others)
    _write_json(out / "orbit.json", doc)
    return EXIT_OK


def _cmd_poincare(sc: Scenario, args, out: Path) -> int:
    box = sc.domain if args.box is None else args.box
    starts = analysis.grid_starts(box, *args.grid)
    its = analysis.poincare_grid(sc.system, sc.integrator, starts, args.iters, args.workers)
    analysis.write_poincare_csv(its, out / "poincare.csv")
    spreads = [analysis.point_spread(its[:, k]) for k in range(its.shape[1])]
    _write_json(out / "poincare_spread.json", {"spread": spreads})
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "pair": _cmd_pair,
    "verify": _cmd_verify,
    "orbit": _cmd_orbit,
    "poincare": _cmd_poincare,
}


def run_command(argv) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        sc = load_scenario(args.scenario)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return _COMMANDS[args.command](sc, args, out)
    except (FilippovError, ValueError, FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
