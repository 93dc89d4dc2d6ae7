"""Phase-plane projections of Filippov trajectories from a uniform grid of starts in K.

Forward Euler over five forcing periods; output phase.csv (run, t, x1, x2, mode).
"""

import math

import numpy as np

from _common import out_dir, write_csv
from filippov_contraction.analysis import grid_starts
from filippov_contraction.flow import IntegratorCfg, simulate
from filippov_contraction.geometry import SystemDef

out = out_dir("phase_portrait")
sys_ = SystemDef(1.8, 0.1, period=4 * math.pi)
cfg = IntegratorCfg(method="Euler", dt=5 * sys_.period / 2000)
starts = grid_starts((-1.2, 1.2, -1.5, 1.5), 6, 6)

rows = []
for run, x0 in enumerate(starts):
    tr = simulate(sys_, cfg, x0, 0.0, 5 * sys_.period)
    rows.extend((run, t, a, b, m.value) for t, (a, b), m in zip(tr.t, tr.x, tr.modes))
write_csv(out / "phase.csv", ["run", "t", "x1", "x2", "mode"], rows)
