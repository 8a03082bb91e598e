"""Deterministic JSON and CSV rendering of command reports.

Floats are written with 17 significant digits, which round-trips every
double; non-finite floats become ``null``. Keys keep insertion order.
"""
from __future__ import annotations

import csv
import io
import json
import math


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def _emit(obj, out):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key)) + ": ")
            _emit(value, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, value in enumerate(obj):
            if i:
                out.append(", ")
            _emit(value, out)
        out.append("]")
    elif hasattr(obj, "item"):  # numpy scalar
        _emit(obj.item(), out)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json(doc) -> str:
    """Serialize ``doc`` with one row per line for readability."""
    if isinstance(doc, dict) and "rows" in doc:
        head = {key: v for key, v in doc.items() if key != "rows"}
        parts = ["{"]
        for key, value in head.items():
            buf = []
            _emit(value, buf)
            parts.append(f"  {json.dumps(key)}: {''.join(buf)},")
        parts.append('  "rows": [')
        rows = []
        for row in doc["rows"]:
            buf = []
            _emit(row, buf)
            rows.append("    " + "".join(buf))
        parts.append(",\n".join(rows))
        parts.append("  ]")
        parts.append("}")
        return "\n".join(p for p in parts if p) + "\n"
    buf = []
    _emit(doc, buf)
    return "".join(buf) + "\n"


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        text = format_float(value)
        return "" if text == "null" else text
    if isinstance(value, (list, tuple)):
        return " ".join(str(_cell(v)) for v in value)
    if hasattr(value, "item"):
        return _cell(value.item())
    return str(value)


def to_csv(rows) -> str:
    """Flat projection: the header is the union of row keys in first-seen order."""
    header = []
    for row in rows:
        for key in row:
            if key not in header:
                header.append(key)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row.get(key)) for key in header])
    return buf.getvalue()
