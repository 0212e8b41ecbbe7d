"""Python front end for the msms mixture solver."""

import json as _json

from ._core import (  # noqa: F401
    NonConvergence,
    ScenarioError,
    convergence_rates,
    mobility,
    preset_names,
    w_from_x,
    x_from_w,
)
from . import _core

__all__ = [
    "NonConvergence",
    "ScenarioError",
    "convergence",
    "convergence_rates",
    "mobility",
    "preset",
    "preset_names",
    "run",
    "validate",
    "w_from_x",
    "x_from_w",
]


def preset(name):
    """Built-in scenario as a plain dict."""
    return _json.loads(_core.preset_json(name))


def validate(scenario):
    """Checked copy of a scenario dict with every default filled in."""
    return _json.loads(_core.normalize_scenario_json(_json.dumps(scenario)))


def run(scenario):
    """Run a scenario dict; returns frames (t, y, rho, phi) and per-step diagnostics."""
    return _core.run_json(_json.dumps(scenario))


def convergence(scenario, max_jobs=0):
    return _core.convergence_json(_json.dumps(scenario), max_jobs)
