"""Deterministic JSON serialization for scenario reports.

Floats are rendered with 17 significant digits and keys are sorted, so
two runs of the same scenario produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from typing import IO

SCHEMA_VERSION = 1


def _render(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return '"nan"'
        if math.isinf(obj):
            return '"inf"' if obj > 0 else '"-inf"'
        return format(obj, ".17g")
    if isinstance(obj, complex):
        return _render([obj.real, obj.imag])
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: kv[0])
        body = ",".join(f"{json.dumps(str(k))}:{_render(v)}" for k, v in items)
        return "{" + body + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_render(v) for v in obj) + "]"
    try:
        return _render(float(obj))
    except (TypeError, ValueError):
        raise TypeError(f"cannot serialize {type(obj).__name__} deterministically")


def dumps(report: dict) -> str:
    return _render(report) + "\n"


def dump(report: dict, fh: IO[str]) -> None:
    fh.write(dumps(report))
