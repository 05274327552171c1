"""Simulation and parameter estimation for a linear parabolic SPDE on the unit square."""

import json

from ._spdeest import (
    ModelParams,
    ResourceError,
    asymptotic_mean,
    default_config,
    eigenfunction,
    eigenvalue,
    estimate_field,
    expected_squared_increments,
    q1_plugin,
    q2_known_plugin,
    q2_unknown_plugin,
    read_field,
    run_monte_carlo,
    run_replication,
    simulate_field,
    write_field,
)


def make_config(**overrides):
    """Default config as a dict, with nested sections updated from keyword arguments."""
    cfg = json.loads(default_config())
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(cfg.get(key), dict):
            cfg[key].update(value)
        else:
            cfg[key] = value
    return cfg


__all__ = [
    "ModelParams",
    "ResourceError",
    "asymptotic_mean",
    "default_config",
    "eigenfunction",
    "eigenvalue",
    "estimate_field",
    "expected_squared_increments",
    "make_config",
    "q1_plugin",
    "q2_known_plugin",
    "q2_unknown_plugin",
    "read_field",
    "run_monte_carlo",
    "run_replication",
    "simulate_field",
    "write_field",
]
