"""Distance between two nearby trajectories, with log-slope fit over [2T, 5T].

Equivalent CLI call:
    filippov-contraction pair --scenario forced2d --x0 0.1,1.0 --x0b 0.101,1.001 --nu 0.05
"""

from _common import out_dir
from filippov_contraction.cli import run_command

out = out_dir("pair_distance")
code = run_command(["pair", "--scenario", "forced2d", "--x0", "0.1,1.0", "--x0b", "0.101,1.001",
                    "--nu", "0.05", "--out", str(out)])
print(f"pair exit code {code}; see {out / 'pair.csv'} and {out / 'pair_fit.json'}")
