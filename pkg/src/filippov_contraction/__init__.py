"""Simulation and weighted-contraction verification for planar time-periodic Filippov systems."""

from .analysis import (
    DecayFit,
    OrbitResult,
    PairSeries,
    comparison_bound,
    find_periodic_orbit,
    fit_decay_rate,
    pair_series,
    poincare_grid,
    time_T_map,
    verify_comparison,
)
from .contraction import ContractionReport, GridSpec, check_A2, check_A3, check_A4, check_A5
from .flow import FlowMode, IntegratorCfg, SwitchEvent, Trajectory, simulate, sliding_alpha, step
from .geometry import RegionSign, SystemDef, classify_region, eval_side, filippov_hull
from .scenario import Scenario, load_scenario
from .weight import WeightSpec

__version__ = "0.1.0"

__all__ = [
    "ContractionReport", "DecayFit", "FlowMode", "GridSpec", "IntegratorCfg", "OrbitResult",
    "PairSeries", "RegionSign", "Scenario", "SwitchEvent", "SystemDef", "Trajectory",
    "WeightSpec", "check_A2", "check_A3", "check_A4", "check_A5", "classify_region",
    "comparison_bound", "eval_side", "filippov_hull", "find_periodic_orbit", "fit_decay_rate",
    "load_scenario", "pair_series", "poincare_grid", "simulate", "sliding_alpha", "step",
    "time_T_map", "verify_comparison",
]
