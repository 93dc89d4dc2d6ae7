"""x1(t) from (0.3, 1.0) over five periods, forward Euler, with the event log.

Equivalent CLI call (RK4 default integrator):
    filippov-contraction simulate --scenario forced2d --x0 0.3,1.0 --horizon 5
"""

import math

from _common import out_dir
from filippov_contraction.flow import IntegratorCfg, simulate, write_events_csv, write_trajectory_csv
from filippov_contraction.geometry import SystemDef

out = out_dir("x1_switching")
sys_ = SystemDef(1.8, 0.1, period=4 * math.pi)
cfg = IntegratorCfg(method="Euler", dt=5 * sys_.period / 2000)
tr = simulate(sys_, cfg, (0.3, 1.0), 0.0, 5 * sys_.period)
write_trajectory_csv(tr, out / "trajectory.csv")
write_events_csv(tr.events, out / "events.csv")
print(f"{len(tr.events)} events")
