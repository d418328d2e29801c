"""Canonical JSON and CSV encodings.

JSON is byte-stable: keys sorted, no whitespace variation, floats written with
17 significant digits. CSV uses the same float formatting so both encodings
carry identical numbers.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot encode non-finite value {x!r}")
    return format(x, ".17g")


def _encode(obj, out):
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key)))
            out.append(":")
            _encode(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _encode(item, out)
        out.append("]")
    elif hasattr(obj, "to_dict"):
        _encode(obj.to_dict(), out)
    else:
        raise TypeError(f"cannot encode {type(obj).__name__}")


def canonical_json(obj) -> str:
    out = []
    _encode(obj, out)
    return "".join(out) + "\n"


REPORT_COLUMNS = ("bound_id", "lhs", "rhs", "slack", "pass")


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def reports_to_csv(reports) -> str:
    """One row per report; context keys become extra columns in sorted order."""
    rows = [r.to_dict() if hasattr(r, "to_dict") else r for r in reports]
    ctx_keys = sorted({k for r in rows for k in r.get("context", {})})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(REPORT_COLUMNS) + [f"context.{k}" for k in ctx_keys])
    for r in rows:
        ctx = r.get("context", {})
        writer.writerow([_cell(r[c]) for c in REPORT_COLUMNS] + [_cell(ctx[k]) if k in ctx else "" for k in ctx_keys])
    return buf.getvalue()


def curve_to_csv(curve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["step", "F"])
    for t, f in enumerate(curve):
        writer.writerow([t, format_float(f)])
    return buf.getvalue()
