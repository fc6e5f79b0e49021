"""Deterministic JSON, CSV and SVG output.

Floats are always written as ``%.12e`` so identical runs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

FLOAT_FMT = "%.12e"


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return FLOAT_FMT % x


def to_json(obj, indent: int = 2) -> str:
    """JSON text with fixed float formatting and insertion-ordered keys."""
    out = io.StringIO()
    _write(obj, out, indent, 0)
    out.write("\n")
    return out.getvalue()


def _write(obj, out, indent, level):
    pad = " " * (indent * (level + 1))
    end_pad = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        for i, (key, val) in enumerate(obj.items()):
            out.write(f"{pad}{json.dumps(str(key))}: ")
            _write(val, out, indent, level + 1)
            out.write(",\n" if i < len(obj) - 1 else "\n")
        out.write(end_pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.write("[]")
            return
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in items):
            out.write("[" + ", ".join(_scalar(v) for v in items) + "]")
            return
        out.write("[\n")
        for i, val in enumerate(items):
            out.write(pad)
            _write(val, out, indent, level + 1)
            out.write(",\n" if i < len(items) - 1 else "\n")
        out.write(end_pad + "]")
    else:
        out.write(_scalar(obj))


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _fmt_float(float(v))
    return json.dumps(str(v))


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return _fmt_float(float(v))
    return str(v)


def _flatten(row: dict) -> dict:
    flat = {}
    for key, val in row.items():
        if isinstance(val, dict):
            for sub, v in val.items():
                flat[f"{key}_{sub}"] = v
        else:
            flat[key] = val
    return flat


def to_csv(rows: list[dict]) -> str:
    """One line per row; nested dicts become ``<key>_<subkey>`` columns."""
    out = io.StringIO()
    flat = [_flatten(r) for r in rows]
    header: list[str] = []
    for r in flat:
        for key in r:
            if key not in header:
                header.append(key)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for r in flat:
        writer.writerow([_cell(r.get(h)) for h in header])
    return out.getvalue()


def table_rows(result) -> list[dict]:
    d = result.to_dict()
    for key in ("rows", "steps", "entries"):
        if key in d:
            return d[key]
    raise TypeError(f"{type(result).__name__} has no tabular rows")


def emit_report(result, fmt: str = "json") -> str:
    if fmt == "json":
        return to_json(result.to_dict())
    if fmt == "csv":
        return to_csv(table_rows(result))
    raise ValueError(f"unknown format {fmt!r}")


def emit_svg(series, width: int = 640, height: int = 420) -> str:
    """Ratio-vs-n line chart with the continuum constant as a dashed reference line."""
    ns = [e["n"] for e in series.entries]
    rs = [e["ratio"] for e in series.entries]
    left, right, top, bottom = 70, 20, 40, 50
    pw, ph = width - left - right, height - top - bottom
    x_lo, x_hi = (min(ns), max(ns)) if ns else (0, 1)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    ys = rs + [series.reference, 1.0]
    y_lo, y_hi = min(0.0, min(ys)), max(ys) * 1.05

    def sx(x):
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph

    pts = " ".join(f"{sx(n):.2f},{sy(r):.2f}" for n, r in zip(ns, rs))
    ref_y = sy(series.reference)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line class="axis" x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line class="axis" x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for n in ns:
        lines.append(f'<text x="{sx(n):.2f}" y="{top + ph + 18}" font-size="11" '
                     f'text-anchor="middle">{n}</text>')
    for j in range(6):
        y = y_lo + (y_hi - y_lo) * j / 5
        lines.append(f'<text x="{left - 6}" y="{sy(y) + 4:.2f}" font-size="11" '
                     f'text-anchor="end">{y:.3f}</text>')
    lines += [
        f'<line class="reference" x1="{left}" y1="{ref_y:.2f}" x2="{left + pw}" y2="{ref_y:.2f}" '
        f'stroke="red" stroke-dasharray="6,4"/>',
        f'<polyline class="ratio" points="{pts}" fill="none" stroke="blue" stroke-width="2"/>',
        f'<text x="{left + pw}" y="{ref_y - 6:.2f}" font-size="11" text-anchor="end" fill="red">'
        f'c_{series.k} = {series.reference:.6f}</text>',
        f'<text x="{left + pw / 2}" y="{height - 10}" font-size="12" text-anchor="middle">n '
        f'(path [0, n])</text>',
        f'<text x="{width / 2}" y="{top - 15}" font-size="13" text-anchor="middle">'
        f'(lambda_{series.k}^1)^2 / lambda_{series.k}^2 on [0, n]</text>',
        "</svg>",
    ]
    return "\n".join(lines) + "\n"
