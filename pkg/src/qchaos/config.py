"""Config parsing and validation for the experiment runner.

A config is either key=value lines (# comments allowed) or a single JSON
object.  Every run names a command; unknown commands, unknown keys, missing
required keys and out-of-range values are all collected and reported
together.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError

__all__ = ["RunConfig", "parse_config", "COMMANDS"]


def _float(x):
    v = float(x)
    if not math.isfinite(v):
        raise ValueError("not finite")
    return v


def _pos_int(x):
    v = int(x)
    if v < 1:
        raise ValueError("must be >= 1")
    return v


def _nonneg_float(x):
    v = _float(x)
    if v < 0:
        raise ValueError("must be >= 0")
    return v


def _fraction_open(x):
    v = _float(x)
    if not (0.0 < v <= 1.0):
        raise ValueError("must lie in (0, 1]")
    return v


def _spin(x):
    v = _float(x)
    if v < 0 or abs(2 * v - round(2 * v)) > 1e-9:
        raise ValueError("must be a non-negative half-integer")
    return v


def _str_choice(*choices):
    def conv(x):
        s = str(x)
        if s not in choices:
            raise ValueError(f"must be one of {choices}")
        return s
    return conv


def _int_list(x):
    if isinstance(x, (list, tuple)):
        return [int(v) for v in x]
    return [int(v) for v in str(x).split(",") if v.strip() != ""]


def _float_pair(x):
    if isinstance(x, (list, tuple)):
        vals = [float(v) for v in x]
    else:
        vals = [float(v) for v in str(x).split(",")]
    if len(vals) != 2:
        raise ValueError("expected two comma-separated numbers")
    return tuple(vals)


def _float_triple(x):
    if isinstance(x, (list, tuple)):
        vals = [float(v) for v in x]
    else:
        vals = [float(v) for v in str(x).split(",")]
    if len(vals) != 3:
        raise ValueError("expected three comma-separated numbers")
    return tuple(vals)


def _str_list(x):
    if isinstance(x, (list, tuple)):
        return [str(v) for v in x]
    return [s.strip() for s in str(x).split(",") if s.strip()]


# key -> (converter, default); default None with required=True markers below
_DRIVERS = ("kicked_top", "kicked_top_no_tr", "coe_fixed", "cue_fixed", "haar_fresh")

COMMANDS = {
    "poincare": {
        "system": (_str_choice("kicked_top", "coupled_tops"), "kicked_top"),
        "alpha": (_float, 1.4),
        "lambda": (_float, 7.0),
        "beta": (_float, math.pi / 2),
        "n_seeds": (_pos_int, 20),
        "n_steps": (_pos_int, 500),
    },
    "husimi": {
        "J": (_spin, 150.0),
        "alpha": (_float, None),
        "beta": (_float, math.pi / 2),
        "states": (_int_list, [0]),
        "resolution": (_pos_int, 64),
    },
    "floquet-spectrum": {
        "J": (_spin, 150.0),
        "alpha": (_float, None),
        "beta": (_float, math.pi / 2),
        "resolution": (_pos_int, 64),
    },
    "entanglement-map": {
        "J": (_spin, 150.0),
        "alpha": (_float, None),
        "beta": (_float, math.pi / 2),
        "grid": (_pos_int, 60),
        "window": (_float_pair, (300, 320)),
        "lyapunov_steps": (_pos_int, 1000),
        "lyapunov_threshold": (_nonneg_float, 0.02),
    },
    "entanglement-history": {
        "J": (_spin, 150.0),
        "alpha": (_float, None),
        "beta": (_float, math.pi / 2),
        "delta_theta": (_nonneg_float, None),
        "delta_phi": (_float, None),
        "n_steps": (_pos_int, 400),
    },
    "tomography": {
        "driver": (_str_choice(*_DRIVERS), "kicked_top"),
        "j": (_spin, 10.0),
        "alpha": (_float, 1.4),
        "lambda": (_float, 7.0),
        "sigma": (_nonneg_float, -1.0),   # -1 means 0.05*j
        "n_steps": (_pos_int, 200),
        "n_states": (_pos_int, 100),
        "fidelity_stride": (_pos_int, 5),
        "notr_lams": (_float_triple, (7.0, 7.5, 8.0)),
        "notr_alphas": (_float_triple, (1.4, 1.1, 0.9)),
    },
    "rmt-baseline": {
        "drivers": (_str_list, ["kicked_top", "coe_fixed"]),
        "j": (_spin, 10.0),
        "alpha": (_float, 1.4),
        "lambda": (_float, 7.0),
        "sigma": (_nonneg_float, -1.0),
        "n_steps": (_pos_int, 200),
        "n_draws": (_pos_int, 20),
        "notr_lams": (_float_triple, (7.0, 7.5, 8.0)),
        "notr_alphas": (_float_triple, (1.4, 1.1, 0.9)),
    },
    "discord": {
        "state": (_str_choice("zero_plus", "bell", "file"), "zero_plus"),
        "state_file": (str, ""),
        "search_resolution": (_pos_int, 64),
    },
}

_GLOBAL_KEYS = {
    "seed": (int, 0),
    "out_dir": (str, "."),
    "threads": (_pos_int, 0),   # 0: resolve from env / default 1
}


@dataclass
class RunConfig:
    command: str
    params: dict
    seed: int = 0
    out_dir: str = "."
    threads: int = 0
    raw: dict = field(default_factory=dict)


def _raw_pairs(text):
    text = text.strip()
    if not text:
        raise DomainError("config error: command required (empty input)")
    if text.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"config error: invalid JSON ({exc})") from exc
        if not isinstance(obj, dict):
            raise DomainError("config error: JSON config must be an object")
        return obj
    pairs = {}
    errors = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected key=value, got {line!r}")
            continue
        key, _, val = line.partition("=")
        pairs[key.strip()] = val.strip()
    if errors:
        raise DomainError("config error: " + "; ".join(errors))
    return pairs


def parse_config(text):
    """Validate a config text; raises DomainError naming every bad key."""
    raw = _raw_pairs(text)
    errors = []
    command = raw.get("command")
    if command is None:
        raise DomainError("config error: command required")
    command = str(command)
    if command not in COMMANDS:
        raise DomainError(
            f"config error: unknown command {command!r}; known: {sorted(COMMANDS)}")
    schema = COMMANDS[command]
    params = {}
    for key, (conv, default) in schema.items():
        if key in raw:
            try:
                params[key] = conv(raw[key])
            except (ValueError, TypeError) as exc:
                errors.append(f"key `{key}`: {exc}")
        elif default is None:
            errors.append(f"key `{key}`: required for command {command}")
        else:
            params[key] = default
    extras = {}
    for key, (conv, default) in _GLOBAL_KEYS.items():
        if key in raw:
            try:
                extras[key] = conv(raw[key])
            except (ValueError, TypeError) as exc:
                errors.append(f"key `{key}`: {exc}")
        else:
            extras[key] = default
    known = set(schema) | set(_GLOBAL_KEYS) | {"command"}
    for key in raw:
        if key not in known:
            errors.append(f"key `{key}`: unknown for command {command}")
    if errors:
        raise DomainError("config error: " + "; ".join(sorted(errors)))
    if command == "rmt-baseline":
        bad = [d for d in params["drivers"] if d not in _DRIVERS]
        if bad:
            raise DomainError(f"config error: key `drivers`: unknown drivers {bad}")
    if command == "discord" and params["state"] == "file" and not params["state_file"]:
        raise DomainError("config error: key `state_file`: required when state=file")
    return RunConfig(command=command, params=params, raw=dict(raw), **extras)
