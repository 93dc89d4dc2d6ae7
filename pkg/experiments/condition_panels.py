"""Smooth and jump conditions with delta = 0.2.

smooth.csv: W' + lambda_max on a (t, x1) grid at x2 = 0, surface band left out.
jump.csv:   both sides of the weighted jump inequality at t = 0 for x2 in [-3, 3].
summary.json: measured sup of the smooth quantity and the jump margin.
"""

import json

import numpy as np

from _common import out_dir, write_csv
from filippov_contraction import contraction as cc
from filippov_contraction.geometry import SystemDef
from filippov_contraction.weight import WeightSpec, jump_limits, orbital_derivative

out = out_dir("condition_panels")
sys_ = SystemDef(1.8, 0.1)
w = WeightSpec(0.2, 0.2)

t, x1 = np.meshgrid(np.linspace(0, 2 * np.pi, 65), np.linspace(-1.2, 1.2, 481), indexing="ij")
x = np.stack([x1, np.zeros_like(x1)], -1)
fp, fm = sys_.branches(t, x)
v = np.where((x1 > 0)[..., None], fp, fm)
value = orbital_derivative(w, t, x, v) + cc.clarke_lambda_max(sys_, t, x)
off = x1 != 0
write_csv(out / "smooth.csv", ["t", "x1", "value"], zip(t[off], x1[off], value[off]))

x2 = np.linspace(-3, 3, 121)
xs = np.stack([np.zeros_like(x2), x2], -1)
fp, fm = sys_.branches(0.0, xs)
w_plus, w_minus = jump_limits(w)
lhs = np.exp(w_plus) * np.linalg.norm(fp, axis=-1)
rhs = np.exp(w_minus) * np.linalg.norm(fm, axis=-1) * np.exp(-w.delta)
write_csv(out / "jump.csv", ["x2", "lhs", "rhs"], zip(x2, lhs, rhs))

a3 = cc.check_A3(sys_, w, [0.0], x2, eps_jump=w.delta)
summary = {"smooth_sup": float(value[off].max()), "smooth_inf": float(value[off].min()),
           "jump_sup": a3.sup_value, "jump_ratio": a3.details["ratio_max"]}
(out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
print(summary)
