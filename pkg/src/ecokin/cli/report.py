"""Deterministic report writers (CSV long format and JSON lines).

Floats are written with 17 significant digits so output bytes depend only on
the computed values.
"""
from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

from ecokin.cli.config import VERSION

CSV_HEADER = ("record", "block", "command", "row", "field", "value")


def fmt_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def fmt_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, (int, Fraction)):
        return str(v)
    return str(v)


def _json_value(v) -> str:
    if isinstance(v, dict):
        return _json_obj(v)
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_json_value(x) for x in v) + "]"
    if isinstance(v, float):
        if math.isfinite(v):
            return fmt_float(v)
        return json.dumps(fmt_float(v))
    if isinstance(v, Fraction):
        return json.dumps(str(v))
    return json.dumps(v)


def _json_obj(d: dict) -> str:
    return "{" + ",".join(f"{json.dumps(str(k))}:{_json_value(v)}" for k, v in d.items()) + "}"


def _params(params: dict) -> str:
    return _json_obj(dict(sorted(params.items())))


def _meta(env):
    return [("version", VERSION), ("digest", env.digest), ("seed", env.seed)]


def render_csv(env) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for k, v in _meta(env):
        w.writerow(("meta", "", "", "", k, fmt_value(v)))
    for b in env.blocks:
        w.writerow(("block", b.index, b.command.kind, "", "params", _params(b.command.params)))
        for r, row in enumerate(b.rows):
            for k, v in row.items():
                w.writerow(("row", b.index, b.command.kind, r, k, fmt_value(v)))
        for msg in b.warnings:
            w.writerow(("warning", b.index, b.command.kind, "", "message", msg))
    return buf.getvalue()


def render_jsonl(env) -> str:
    lines = [_json_obj({"record": "meta", **dict(_meta(env))})]
    for b in env.blocks:
        lines.append(_json_obj({"record": "block", "block": b.index, "command": b.command.kind,
                                "params": dict(sorted(b.command.params.items()))}))
        for r, row in enumerate(b.rows):
            lines.append(_json_obj({"record": "row", "block": b.index, "command": b.command.kind,
                                    "row": r, **row}))
        for msg in b.warnings:
            lines.append(_json_obj({"record": "warning", "block": b.index,
                                    "command": b.command.kind, "message": msg}))
    return "\n".join(lines) + "\n"


def render(env, fmt: str) -> str:
    if fmt == "csv":
        return render_csv(env)
    if fmt in ("jsonl", "json-lines"):
        return render_jsonl(env)
    raise ValueError(f"unknown output format {fmt!r}")


def render_plot_data(env) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("series", "x", "y"))
    for b in env.blocks:
        for series, x, y in b.plot:
            w.writerow((f"b{b.index}:{b.command.kind}:{series}", fmt_float(x), fmt_float(y)))
    return buf.getvalue()
