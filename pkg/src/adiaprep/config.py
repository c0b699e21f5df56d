"""Experiment configuration: JSON schema, validation, and object construction.

A config file is a single JSON object with four blocks::

    {
      "model":    {"type": "ising", "L": 9},
      "schedule": {"kind": "piecewise_beta", "n": 1, "d": 0.1,
                   "reference": "linear"},
      "run":      {"epsilon": [0.01, 0.005], "tolerance": 1e-12,
                   "samples": 200},
      "output":   {"directory": "out", "formats": ["csv", "json"]}
    }

Unknown keys anywhere are rejected.  Exactly one of run.T / run.epsilon must
be given.  The Rydberg model block takes L, spacing_um, omega_r_mhz,
delta_r_mhz (converted to rad/us internally) and start_ferromagnetic.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .models import (
    DEFAULT_DIM_CAP,
    EllipticPathParams,
    IsingSemicirclePath,
    RydbergEllipticPath,
    chain_positions,
)
from .schedules import (
    beta_schedule,
    gap_informed_schedule,
    linear_schedule,
    piecewise_schedule,
    sqrt_schedule,
    truncated_cosine,
)
from .spectral import GapProfile, gap_profile

ENV_OUTPUT_DIR = "ADIAPREP_OUTDIR"

_SCHEMA = {
    "model": {
        "type": (str, ("ising", "rydberg")),
        "L": (int, None),
        "spacing_um": (float, None),
        "omega_r_mhz": (float, None),
        "delta_r_mhz": (float, None),
        "start_ferromagnetic": (bool, None),
        "dim_cap": (int, None),
    },
    "schedule": {
        "kind": (str, ("linear", "beta", "piecewise_beta", "sqrt", "gap_informed")),
        "n": (int, None),
        "d": (float, None),
        "reference": (str, ("linear", "gap_informed")),
        "gap_table_path": (str, None),
        "degree": (int, None),
        "gap_grid_size": (int, None),
    },
    "run": {
        "T": (list, None),
        "epsilon": (list, None),
        "tolerance": (float, None),
        "samples": (int, None),
        "backend": (str, ("dop853", "rk4")),
        "max_workers": (int, None),
    },
    "output": {
        "directory": (str, None),
        "formats": (list, None),
    },
}

_DEFAULTS = {
    "model": {"type": "ising", "L": 9, "spacing_um": 5.6, "omega_r_mhz": 2.5,
              "delta_r_mhz": 8.75, "start_ferromagnetic": True,
              "dim_cap": DEFAULT_DIM_CAP},
    "schedule": {"kind": "linear", "n": 1, "d": 0.1, "reference": "linear",
                 "gap_table_path": None, "degree": 10, "gap_grid_size": 101},
    "run": {"T": None, "epsilon": None, "tolerance": 1e-12, "samples": 200,
            "backend": "dop853", "max_workers": None},
    "output": {"directory": "adiaprep-out", "formats": ["csv", "json"]},
}


def _check_block(name, block, schema):
    if not isinstance(block, dict):
        raise ConfigError(f"{name}: expected an object, got {type(block).__name__}")
    for key, value in block.items():
        if key not in schema:
            raise ConfigError(f"{name}.{key}: unknown key")
        expected, choices = schema[key]
        if value is None:
            continue
        if expected is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if expected is int and isinstance(value, bool):
            raise ConfigError(f"{name}.{key}: expected {expected.__name__}")
        if not isinstance(value, expected):
            raise ConfigError(
                f"{name}.{key}: expected {expected.__name__}, got {type(value).__name__}"
            )
        if choices is not None and value not in choices:
            raise ConfigError(f"{name}.{key}: must be one of {choices}; got {value!r}")


def validate_config(raw: dict) -> dict:
    """Validate a raw config dict and fill defaults; returns the resolved copy."""
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected a JSON object")
    for key in raw:
        if key not in _SCHEMA:
            raise ConfigError(f"{key}: unknown top-level block")
    resolved = {}
    for block, defaults in _DEFAULTS.items():
        given = raw.get(block, {})
        _check_block(block, given, _SCHEMA[block])
        merged = dict(defaults)
        merged.update(given)
        resolved[block] = merged

    run = resolved["run"]
    if (run["T"] is None) == (run["epsilon"] is None):
        raise ConfigError("run: exactly one of T or epsilon must be given")
    times = run["T"] if run["T"] is not None else run["epsilon"]
    if not times or not all(isinstance(v, (int, float)) and v > 0 for v in times):
        raise ConfigError("run: T/epsilon must be a nonempty list of positive numbers")
    if run["tolerance"] <= 0:
        raise ConfigError("run.tolerance: must be positive")
    if resolved["model"]["type"] == "rydberg" and resolved["model"]["L"] < 1:
        raise ConfigError("model.L: must be >= 1")
    fmts = resolved["output"]["formats"]
    if not set(fmts) <= {"csv", "json"}:
        raise ConfigError(f"output.formats: must be a subset of ['csv', 'json']")
    return resolved


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return validate_config(raw)


def apply_overrides(raw: dict, assignments) -> dict:
    """Apply ``block.key=json_value`` command-line overrides to a raw dict."""
    out = json.loads(json.dumps(raw))
    for item in assignments or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected block.key=value")
        dotted, _, text = item.partition("=")
        parts = dotted.split(".")
        if len(parts) != 2:
            raise ConfigError(f"override {item!r}: expected block.key=value")
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text  # bare strings allowed
        out.setdefault(parts[0], {})[parts[1]] = value
    return out


def build_path(cfg: dict):
    model = cfg["model"]
    if model["type"] == "ising":
        return IsingSemicirclePath(model["L"], dim_cap=model["dim_cap"])
    params = EllipticPathParams(
        omega_r=model["omega_r_mhz"] * 2 * math.pi,
        delta_r=model["delta_r_mhz"] * 2 * math.pi,
    )
    return RydbergEllipticPath(
        chain_positions(model["L"], model["spacing_um"]),
        params=params,
        start_ferromagnetic=model["start_ferromagnetic"],
        dim_cap=model["dim_cap"],
    )


def build_reference_schedule(cfg: dict, path):
    sched = cfg["schedule"]
    if sched["reference"] == "linear":
        return linear_schedule()
    return _gap_informed_from(cfg, path)


def _gap_informed_from(cfg: dict, path):
    sched = cfg["schedule"]
    if sched["gap_table_path"]:
        profile = GapProfile.from_csv(sched["gap_table_path"])
    else:
        profile = gap_profile(path, grid_size=sched["gap_grid_size"])
    return gap_informed_schedule(profile, truncated_cosine, degree=sched["degree"])


def build_schedule(cfg: dict, path):
    """Construct the schedule named by the config for the given path."""
    sched = cfg["schedule"]
    kind = sched["kind"]
    if kind == "linear":
        return linear_schedule()
    if kind == "beta":
        return beta_schedule(sched["n"])
    if kind == "gap_informed":
        return _gap_informed_from(cfg, path)
    reference = build_reference_schedule(cfg, path)
    if kind == "piecewise_beta":
        return piecewise_schedule(beta_schedule(sched["n"]), reference, sched["d"])
    return sqrt_schedule(reference, sched["d"])


def epsilon_list(cfg: dict):
    run = cfg["run"]
    if run["epsilon"] is not None:
        return [float(e) for e in run["epsilon"]]
    return [1.0 / float(t) for t in run["T"]]


def output_directory(cfg: dict, cli_value=None) -> str:
    """Output directory with precedence CLI flag > environment > config."""
    if cli_value:
        return cli_value
    return os.environ.get(ENV_OUTPUT_DIR) or cfg["output"]["directory"]


def config_header(cfg: dict) -> str:
    return "config: " + json.dumps(cfg, sort_keys=True, default=str)
