"""Deterministic JSON with floats written to 17 significant digits."""

from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np

__all__ = ["dumps", "to_plain"]


def to_plain(obj):
    """Convert numpy scalars, complex numbers, tuples and sets to JSON-ready values.

    Complex numbers become ``[re, im]``; sets are sorted; non-finite floats
    become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
    """
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return [to_plain(v) for v in sorted(obj)]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_plain(float(obj.real)), to_plain(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_json"):
        return to_plain(obj.to_json())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _encode(obj, indent: int, level: int, digits: int = 17) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(k) + ": " + _encode(v, indent, level + 1, digits) for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1, digits) for v in obj) + "]"
        return "[" + pad + ("," + pad).join(_encode(v, indent, level + 1, digits) for v in obj) + end + "]"
    if isinstance(obj, float):
        text = format(obj, f".{digits}g")
        if not any(c in text for c in ".en"):
            text += ".0"
        return text
    return json.dumps(obj)


def dumps(obj, indent: int = 2, digits: int = 17) -> str:
    """Serialise ``obj``; floats keep ``digits`` significant digits (17 round-trips)."""
    return _encode(to_plain(obj), indent, 0, digits)
