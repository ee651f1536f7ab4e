"""Deterministic JSON with 17 significant digits for every float."""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np


def cplx(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _encode(obj: Any, out: list[str]) -> None:
    if isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            raise ValueError(f"cannot encode non-finite float {v}")
        if v == 0.0:
            v = 0.0  # drop the sign of -0.0
        s = format(v, ".17g")
        if not any(ch in s for ch in ".en"):
            s += ".0"
        out.append(s)
    elif isinstance(obj, (complex, np.complexfloating)):
        _encode(cplx(obj), out)
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k)))
            out.append(": ")
            _encode(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _encode(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj: Any) -> str:
    out: list[str] = []
    _encode(obj, out)
    return "".join(out)


def dump(obj: Any, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))
        fh.write("\n")
