"""Time-T map iterates from a 60x60 grid on [-1.5, 1.5] x [-2, 2], k = 0..47.

One data set serves both the planar view (x1, x2) and the lifted view (x1, x2, k).
Equivalent CLI call:
    filippov-contraction poincare --scenario poincare_2pi.json --grid 60x60 --iters 47 --box=-1.5,1.5,-2,2
where poincare_2pi.json is forced2d.json with period_factor 1.
"""

import json

from _common import out_dir
from filippov_contraction.cli import run_command

out = out_dir("poincare_iterates")
scenario = {
    "system": {"mu": 1.8, "alpha": 0.1, "forcing_amp": 1.0, "period_factor": 1},
    "weight": {"delta": 0.05, "eps": 0.01},
    "domain": {"x1_min": -1.5, "x1_max": 1.5, "x2_min": -2.0, "x2_max": 2.0},
    "seed": 0,
}
path = out / "poincare_2pi.json"
path.write_text(json.dumps(scenario, indent=2) + "\n")
code = run_command(["poincare", "--scenario", str(path), "--grid", "60x60", "--iters", "47",
                    "--out", str(out)])
print(f"poincare exit code {code}; see {out / 'poincare.csv'}")
