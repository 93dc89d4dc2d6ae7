"""Same run as x1_switching.py restricted to t in [10, 20], on a finer step."""

import math

from _common import out_dir
from filippov_contraction.flow import IntegratorCfg, simulate, write_events_csv, write_trajectory_csv
from filippov_contraction.geometry import SystemDef

out = out_dir("x1_switching_zoom")
sys_ = SystemDef(1.8, 0.1, period=4 * math.pi)
cfg = IntegratorCfg(method="RK4", dt=1e-3)
full = simulate(sys_, cfg, (0.3, 1.0), 0.0, 20.0)
keep = full.t >= 10.0
full.t, full.x, full.mode_codes = full.t[keep], full.x[keep], full.mode_codes[keep]
full.events = [e for e in full.events if e.time >= 10.0]
write_trajectory_csv(full, out / "trajectory.csv")
write_events_csv(full.events, out / "events.csv")
