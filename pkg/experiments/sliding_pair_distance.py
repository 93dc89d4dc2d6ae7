"""Distance between two trajectories started on and next to the switching line.

Equivalent CLI call:
    filippov-contraction pair --scenario forced2d --x0 0.0,1.0 --x0b 0.001,1.001 --nu 0.05
Also writes both trajectories so sliding windows can be shaded.
"""

import math

from _common import out_dir
from filippov_contraction.cli import run_command
from filippov_contraction.flow import IntegratorCfg, simulate, write_trajectory_csv
from filippov_contraction.geometry import SystemDef

out = out_dir("sliding_pair_distance")
code = run_command(["pair", "--scenario", "forced2d", "--x0", "0.0,1.0", "--x0b", "0.001,1.001",
                    "--nu", "0.05", "--out", str(out)])
sys_ = SystemDef(1.8, 0.1, period=4 * math.pi)
cfg = IntegratorCfg(dt=sys_.period / 2000)
for name, x0 in (("a", (0.0, 1.0)), ("b", (0.001, 1.001))):
    write_trajectory_csv(simulate(sys_, cfg, x0, 0.0, 5 * sys_.period), out / f"trajectory_{name}.csv")
print(f"pair exit code {code}; outputs in {out}")
