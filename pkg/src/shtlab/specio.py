"""JSON specification parsing for spaces, weights, fields, and Young functions."""
from __future__ import annotations

import json
import math
import os

import numpy as np

from .errors import InputError
from .orlicz import Power, PowerLog, YoungFunction
from .space import QuasiMetricSpace, build_space

__all__ = [
    "load_json",
    "parse_space",
    "parse_weight",
    "parse_field",
    "parse_phi",
]


def load_json(path: str):
    if not os.path.exists(path):
        raise InputError(f"unreadable file: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def parse_space(obj) -> QuasiMetricSpace:
    if isinstance(obj, str):
        obj = load_json(obj)
    return build_space(obj)


def _as_array(values, n: int, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (n,):
        raise InputError(f"{what} must be a length-{n} array, got shape {arr.shape}")
    if np.any(np.isnan(arr)):
        raise InputError(f"{what} contains NaN")
    if np.any(arr < 0):
        raise InputError(f"{what} contains a negative value")
    return arr


def parse_weight(obj, space: QuasiMetricSpace) -> np.ndarray:
    """Weight spec: raw array, {"type": "array", ...} or {"type": "power", ...}.

    The power form is w[y] = (dist[center][y] + offset)**alpha with a strictly
    positive offset required when alpha < 0.
    """
    if isinstance(obj, str):
        obj = load_json(obj)
    if isinstance(obj, list):
        return _as_array(obj, space.n, "weight values")
    if not isinstance(obj, dict):
        raise InputError("weight spec must be an array or a JSON object")
    kind = obj.get("type")
    if kind == "array":
        return _as_array(obj.get("values"), space.n, "weight values")
    if kind == "power":
        try:
            alpha = float(obj["alpha"])
            center = int(obj["center"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("power weight spec requires numeric 'alpha' and 'center'") from exc
        offset = float(obj.get("offset", 0.0))
        if not 0 <= center < space.n:
            raise InputError(f"power weight center {center} out of range")
        if alpha < 0 and offset <= 0:
            raise InputError("power weight with alpha < 0 requires offset > 0")
        return (space.dist[center] + offset) ** alpha
    raise InputError(f"unknown weight type {kind!r}; expected 'array' or 'power'")


def parse_field(obj, space: QuasiMetricSpace) -> np.ndarray:
    """Function vectors accept the same forms as weights."""
    return parse_weight(obj, space)


def parse_phi(obj) -> YoungFunction:
    """Young function spec: inline "power:s" / "powerlog:s:a", dict, or file path.

    Exponents must satisfy s > 1 (the exponent-1 boundary is reachable only
    through the library API).
    """
    if isinstance(obj, str):
        if obj.startswith("power:") or obj.startswith("powerlog:"):
            parts = obj.split(":")
            try:
                if parts[0] == "power" and len(parts) == 2:
                    return _make_power(float(parts[1]))
                if parts[0] == "powerlog" and len(parts) == 3:
                    return _make_powerlog(float(parts[1]), float(parts[2]))
            except ValueError as exc:
                raise InputError(f"malformed Young function spec {obj!r}") from exc
            raise InputError(f"malformed Young function spec {obj!r}")
        obj = load_json(obj)
    if not isinstance(obj, dict):
        raise InputError("Young function spec must be an object or inline string")
    family = obj.get("family")
    if family == "power":
        return _make_power(_num(obj, "s"))
    if family == "powerlog":
        return _make_powerlog(_num(obj, "s"), _num(obj, "a"))
    raise InputError(f"unknown Young function family {family!r}")


def _num(obj: dict, key: str) -> float:
    try:
        return float(obj[key])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"Young function spec requires numeric field {key!r}") from exc


def _make_power(s: float) -> Power:
    if not (1.0 < s < math.inf):
        raise InputError(f"power exponent must satisfy s > 1, got {s}")
    return Power(s)


def _make_powerlog(s: float, a: float) -> PowerLog:
    if not (1.0 < s < math.inf):
        raise InputError(f"power-log exponent must satisfy s > 1, got {s}")
    if not (0.0 <= a < math.inf):
        raise InputError(f"power-log log-exponent must satisfy a >= 0, got {a}")
    return PowerLog(s, a)
