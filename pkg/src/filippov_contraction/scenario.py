"""Strict JSON scenario files.

A scenario bundles the system, weight, integrator settings, the compact
domain K and a random seed.  Unknown keys are rejected so that a typo in a
parameter name cannot silently fall back to a default.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ParseError, ValidationError
from .flow import IntegratorCfg
from .geometry import RegionSign, SystemDef
from .weight import WeightSpec

_SECTIONS = {"system", "weight", "integrator", "domain", "seed"}
_SYSTEM_KEYS = {"mu", "alpha", "forcing_amp", "period_factor"}
_WEIGHT_KEYS = {"delta", "eps"}
_INTEGRATOR_KEYS = {"method", "dt", "event_tol", "bisect_iters", "dwell_min", "depart_side"}
_DOMAIN_KEYS = ("x1_min", "x1_max", "x2_min", "x2_max")
_SIDES = {"Plus": RegionSign.PLUS, "Minus": RegionSign.MINUS}


@dataclass(frozen=True)
class Scenario:
    system: SystemDef
    weight: WeightSpec
    integrator: IntegratorCfg
    domain: tuple
    seed: int
    period_factor: float
    source: str = ""


def bundled_scenarios() -> list[str]:
    root = resources.files(__package__) / "scenarios"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def resolve_path(path) -> Path:
    """Existing file path, or the bundled scenario of that name (``.json`` optional)."""
    p = Path(path)
    if p.exists():
        return p
    name = p.name if p.suffix == ".json" else p.name + ".json"
    if str(p.parent) in ("", ".") and name in bundled_scenarios():
        return Path(str(resources.files(__package__) / "scenarios" / name))
    raise FileNotFoundError(f"scenario {path} not found")


def _number(section, key, positive=False, nonneg=False):
    if key not in section:
        raise ValidationError(key, "missing")
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ValidationError(key, "must be a finite number")
    if positive and not v > 0:
        raise ValidationError(key, "must be > 0")
    if nonneg and not v >= 0:
        raise ValidationError(key, "must be >= 0")
    return float(v)


def _section(data, name, allowed, required=True):
    if name not in data:
        if required:
            raise ValidationError(name, "missing")
        return {}
    sec = data[name]
    if not isinstance(sec, dict):
        raise ValidationError(name, "must be an object")
    for key in sorted(sec):
        if key not in allowed:
            raise ValidationError(key, f"unknown key in {name}")
    return sec


def scenario_from_dict(data: dict, source: str = "") -> Scenario:
    if not isinstance(data, dict):
        raise ValidationError("scenario", "top level must be an object")
    for key in sorted(data):
        if key not in _SECTIONS:
            raise ValidationError(key, "unknown top-level key")

    s = _section(data, "system", _SYSTEM_KEYS)
    mu = _number(s, "mu", positive=True)
    alpha = _number(s, "alpha", positive=True)
    amp = _number(s, "forcing_amp", nonneg=True) if "forcing_amp" in s else 1.0
    factor = _number(s, "period_factor", positive=True) if "period_factor" in s else 1.0
    system = SystemDef(mu, alpha, amp, factor * 2.0 * math.pi)

    wsec = _section(data, "weight", _WEIGHT_KEYS)
    weight = WeightSpec(_number(wsec, "delta", nonneg=True), _number(wsec, "eps", positive=True))

    isec = _section(data, "integrator", _INTEGRATOR_KEYS, required=False)
    method = isec.get("method", "RK4")
    if method not in ("RK4", "Euler"):
        raise ValidationError("method", "must be RK4 or Euler")
    dt = _number(isec, "dt", positive=True) if "dt" in isec else system.period / 2000
    event_tol = _number(isec, "event_tol", positive=True) if "event_tol" in isec else 1e-10
    dwell = _number(isec, "dwell_min", nonneg=True) if "dwell_min" in isec else dt / 2
    bisect = isec.get("bisect_iters", 60)
    if isinstance(bisect, bool) or not isinstance(bisect, int) or bisect < 20:
        raise ValidationError("bisect_iters", "must be an integer >= 20")
    side = isec.get("depart_side", "Plus")
    if side not in _SIDES:
        raise ValidationError("depart_side", "must be Plus or Minus")
    integrator = IntegratorCfg(method, dt, event_tol, bisect, dwell, _SIDES[side])

    dsec = _section(data, "domain", set(_DOMAIN_KEYS))
    domain = tuple(_number(dsec, k) for k in _DOMAIN_KEYS)
    if not domain[1] > domain[0]:
        raise ValidationError("x1_max", "must exceed x1_min")
    if not domain[3] > domain[2]:
        raise ValidationError("x2_max", "must exceed x2_min")

    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ValidationError("seed", "must be a nonnegative integer")

    return Scenario(system, weight, integrator, domain, seed, factor, source)


def load_scenario(path) -> Scenario:
    p = resolve_path(path)
    text = p.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(p), exc.lineno, exc.msg) from None
    return scenario_from_dict(data, str(p))
