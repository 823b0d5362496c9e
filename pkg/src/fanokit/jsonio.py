"""Deterministic JSON emission.

The stock json module prints floats via repr, which is fine for round-trips
but does not guarantee a fixed significant-digit count, and it emits Infinity
(invalid JSON). This emitter renders every float with 17 significant digits,
sorts object keys, and maps +/-inf to the strings "inf"/"-inf". NaN is a bug
by contract and raises.

Output is a pure function of the value tree, which is what makes byte-identical
CLI output across runs and thread settings cheap to guarantee.
"""
from __future__ import annotations

import json
import math
from typing import Any


def format_float(x: float) -> str:
    if math.isnan(x):
        raise ValueError("NaN is not representable in toolkit output")
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = "%.17g" % x
    # keep float-ness through a JSON round trip
    if "." not in text and "e" not in text and "E" not in text:
        text += ".0"
    return text


def parse_extended(value: Any) -> float:
    """Accept numbers plus the string forms produced by format_float."""
    if isinstance(value, str):
        s = value.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return math.inf
        if s in ("-inf", "-infinity"):
            return -math.inf
        return float(value)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError("expected a number, got %r" % (value,))
    return float(value)


def _emit(obj: Any, out: list, indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    close_pad = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj.keys())
        for i, key in enumerate(keys):
            if not isinstance(key, str):
                raise TypeError("JSON object keys must be strings, got %r" % (key,))
            out.append(pad + json.dumps(key) + ": ")
            _emit(obj[key], out, indent, level + 1)
            out.append(",\n" if i < len(keys) - 1 else "\n")
        out.append(close_pad + "}")
    elif isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(seq):
            out.append(pad)
            _emit(item, out, indent, level + 1)
            out.append(",\n" if i < len(seq) - 1 else "\n")
        out.append(close_pad + "]")
    else:
        raise TypeError("cannot serialize %r" % type(obj))


def dumps(obj: Any, indent: int = 2) -> str:
    out: list = []
    _emit(obj, out, indent, 0)
    return "".join(out)
