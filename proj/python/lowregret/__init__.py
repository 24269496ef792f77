"""Low-regret control of 1-D fractional diffusion with unknown initial data."""

import json

from ._lowregret import (
    DomainError,
    FracOperator,
    Problem,
    SolverError,
    gamma_sweep,
    normalization_constant,
)
from . import _lowregret

__all__ = [
    "DomainError",
    "FracOperator",
    "Problem",
    "SolverError",
    "gamma_sweep",
    "make_problem",
    "normalization_constant",
    "run_scenario",
    "validate_config",
]


def make_problem(config=None, **overrides):
    """Build a Problem from a scenario config dict, with top-level overrides."""
    cfg = dict(config or {})
    cfg.update(overrides)
    return Problem(json.dumps(cfg))


def validate_config(config):
    """Return the normalized config, raising DomainError on invalid fields."""
    return json.loads(_lowregret.validate_config(json.dumps(config)))


def run_scenario(config_path, out_dir=None, seed=None):
    """Run a config file and return the report as a dict."""
    return json.loads(_lowregret.run_scenario(str(config_path), out_dir, seed))
