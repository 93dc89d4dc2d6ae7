"""W' + lambda_max across the blend layer at t = 0, x2 = 0, delta = 0.15, eps = 0.2.

Output slice.csv (x1, value) and summary.json with the measured minimum and
maximum, plus the largest rate nu the slice would allow.
"""

import json

import numpy as np

from _common import out_dir, write_csv
from filippov_contraction import contraction as cc
from filippov_contraction.geometry import SystemDef
from filippov_contraction.weight import WeightSpec, orbital_derivative

out = out_dir("smooth_condition_slice")
sys_ = SystemDef(1.8, 0.1)
w = WeightSpec(0.15, 0.2)
x1 = np.linspace(-0.3, 0.3, 1201)
x1 = x1[x1 != 0]
x = np.stack([x1, np.zeros_like(x1)], -1)
fp, fm = sys_.branches(0.0, x)
v = np.where((x1 > 0)[:, None], fp, fm)
value = orbital_derivative(w, 0.0, x, v) + cc.clarke_lambda_max(sys_, 0.0, x)
write_csv(out / "slice.csv", ["x1", "value"], zip(x1, value))
summary = {"min": float(value.min()), "max": float(value.max()), "largest_nu": float(-value.max())}
(out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
print(summary)
