"""Trajectories in (t, x1, x2) from uniformly sampled starts in K, forward Euler.

Output: trajectories.csv with one row per sample, columns run,t,x1,x2,mode.
The bold subset used for emphasis is simply runs 0-4.
"""

import math

import numpy as np

from _common import out_dir, write_csv
from filippov_contraction.flow import IntegratorCfg, simulate
from filippov_contraction.geometry import SystemDef

N_RUNS = 40

out = out_dir("limit_cycle_3d")
sys_ = SystemDef(1.8, 0.1, period=4 * math.pi)
cfg = IntegratorCfg(method="Euler", dt=5 * sys_.period / 2000)
rng = np.random.default_rng(0)
starts = np.stack([rng.uniform(-1.2, 1.2, N_RUNS), rng.uniform(-1.5, 1.5, N_RUNS)], -1)

rows = []
for run, x0 in enumerate(starts):
    tr = simulate(sys_, cfg, x0, 0.0, 5 * sys_.period)
    for t, (a, b), m in zip(tr.t, tr.x, tr.modes):
        rows.append((run, t, a, b, m.value))
write_csv(out / "trajectories.csv", ["run", "t", "x1", "x2", "mode"], rows)
