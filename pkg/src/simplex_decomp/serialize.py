"""Deterministic JSON/CSV emission with round-trip-safe floats.

Every float is printed with 17 significant digits, enough to reconstruct
the exact double, so repeated runs with identical inputs produce
byte-identical output.
"""

from __future__ import annotations

import json
import math

import numpy as np


def format_float(x: float) -> str:
    """17-significant-digit decimal rendering of a finite double."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x}")
    return format(x, ".17g")


def dumps(obj) -> str:
    """JSON text with deterministic key order and 17-digit floats."""
    return _emit(obj)


def _emit(obj) -> str:
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {_emit(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_emit(v) for v in obj) + "]"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    raise TypeError(f"cannot serialize object of type {type(obj).__name__}")


def encode_cmatrix(m: np.ndarray) -> list:
    """Complex matrix as nested lists of [re, im] pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[z.real, z.imag] for z in row] for row in m]


def decode_cmatrix(data) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in data])


def encode_rmatrix(m: np.ndarray) -> list:
    """Real matrix as nested lists of floats."""
    return [[float(x) for x in row] for row in np.asarray(m, dtype=float)]


def csv_row(values) -> str:
    """One CSV line; floats rendered with 17 significant digits."""
    parts = []
    for v in values:
        if isinstance(v, (float, np.floating)):
            parts.append(format_float(v))
        else:
            parts.append(str(v))
    return ",".join(parts)
