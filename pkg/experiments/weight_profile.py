"""Weight W(x1) and its orbital derivatives along f+ and f- at several times.

Outputs weight.csv (x1, W) and orbital_derivative.csv (t, x1, dW_plus, dW_minus).
"""

import numpy as np

from _common import out_dir, write_csv
from filippov_contraction.geometry import SystemDef
from filippov_contraction.weight import WeightSpec, orbital_derivative, weight_value

out = out_dir("weight_profile")
sys_ = SystemDef(1.8, 0.1)
w = WeightSpec(0.15, 0.2)
x1 = np.linspace(-0.4, 0.4, 801)
x = np.stack([x1, np.zeros_like(x1)], -1)
write_csv(out / "weight.csv", ["x1", "W"], zip(x1, weight_value(w, 0.0, x)))

rows = []
for t in np.linspace(0.0, 2 * np.pi, 9):
    fp, fm = sys_.branches(t, x)
    dp = orbital_derivative(w, t, x, fp)
    dm = orbital_derivative(w, t, x, fm)
    rows.extend(zip(np.full_like(x1, t), x1, dp, dm))
write_csv(out / "orbital_derivative.csv", ["t", "x1", "dW_plus", "dW_minus"], rows)
