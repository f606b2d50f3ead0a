"""Frequency-constrained unit commitment: SFR oracle, spline bounds, chance constraints and the UC MILP."""

import json as _json

from . import _frequc
from ._frequc import (
    ConfigError,
    DomainError,
    ParseError,
    ValidationError,
    bernstein_eval,
    bernstein_hull_max,
    drcc_threshold,
    normal_upper_quantile,
    risk_coefficient,
    run_cli,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "ParseError",
    "ValidationError",
    "bernstein_eval",
    "bernstein_hull_max",
    "drcc_threshold",
    "normal_upper_quantile",
    "qss_closed_form",
    "risk_coefficient",
    "rocof_initial",
    "run_cli",
    "simulate",
    "solve",
    "spline_nadir",
]


def _text(scenario):
    return scenario if isinstance(scenario, str) else _json.dumps(scenario)


def simulate(scenario, dt=1e-3):
    """Trajectory and metrics for a scenario dict (same keys as the JSON files)."""
    return _frequc.simulate(_text(scenario), dt)


def rocof_initial(scenario):
    return _frequc.rocof_initial(_text(scenario))


def qss_closed_form(scenario):
    return _frequc.qss_closed_form(_text(scenario))


def spline_nadir(scenario, horizon, segments=None, fractions=None):
    """(nadir, time after the dead-band crossing) of the fixed-commitment spline."""
    return _frequc.spline_nadir(_text(scenario), horizon, segments, fractions)


def solve(system_dir, mode="freq_full", gap=1e-3, time_limit=3600.0, segments=None):
    """Solve a system directory; returns the solution dict with its security report."""
    return _json.loads(_frequc.solve(str(system_dir), mode, gap, time_limit, segments))
