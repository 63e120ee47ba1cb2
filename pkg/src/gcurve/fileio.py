"""Point-cloud ingestion (JSON, CSV) and curve export (CSV, SVG, OBJ)."""
from __future__ import annotations

import csv
import io
import json
import logging
import re
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, ParseError, UnsupportedDimension
from .geometry import PointCloud

log = logging.getLogger(__name__)

_COORD = re.compile(r"^x(\d+)$", re.IGNORECASE)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def infer_format(path, allowed=("json", "csv")) -> str:
    ext = Path(path).suffix.lower().lstrip(".")
    if ext in allowed:
        return ext
    raise ValueError(f"cannot infer the format of {path!s}; expected one of {', '.join(allowed)}")


def parse_json_points(text: str, closed: Optional[bool] = None) -> PointCloud:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if isinstance(doc, list):
        doc = {"points": doc}
    if not isinstance(doc, dict) or "points" not in doc:
        raise ParseError('expected an object with a "points" list', 1, 1)
    pts = doc["points"]
    if not isinstance(pts, list) or not pts:
        raise ParseError('"points" must be a nonempty list', 1, 1)
    rows = []
    for k, p in enumerate(pts):
        if not isinstance(p, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in p):
            raise ParseError(f"point {k} is not a list of numbers")
        rows.append([float(x) for x in p])
    _check_widths(rows)
    flag = doc.get("closed", False)
    if not isinstance(flag, bool):
        raise ParseError('"closed" must be a boolean')
    return PointCloud(np.array(rows), closed=flag if closed is None else closed)


def _check_widths(rows, lines=None):
    width = len(rows[0])
    for k, row in enumerate(rows):
        if len(row) != width:
            where = f" on line {lines[k]}" if lines else f" at point {k}"
            raise DimensionMismatch(f"expected {width} coordinates, found {len(row)}{where}")


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def parse_csv_points(text: str, closed: Optional[bool] = None) -> PointCloud:
    """One point per row.  A header is optional; if it names columns x1..xn only
    those are read, so exported sample files load back as point clouds.  A
    final row equal to the first marks a closed cloud unless ``closed`` says otherwise."""
    rows, lines = [], []
    columns = None
    for lineno, raw in enumerate(csv.reader(io.StringIO(text)), start=1):
        cells = [c.strip() for c in raw]
        if not cells or all(c == "" for c in cells) or cells[0].startswith("#"):
            continue
        if not rows and columns is None and not all(_is_number(c) for c in cells):
            named = [(int(m.group(1)), j) for j, c in enumerate(cells) if (m := _COORD.match(c))]
            columns = [j for _, j in sorted(named)] if named else []
            continue
        if columns:
            if max(columns) >= len(cells):
                raise DimensionMismatch(f"line {lineno} has {len(cells)} fields, header needs {max(columns) + 1}")
            cells = [cells[j] for j in columns]
        row = []
        for col, cell in enumerate(cells, start=1):
            try:
                row.append(float(cell))
            except ValueError:
                raise ParseError(f"not a number: {cell!r}", lineno, col) from None
        rows.append(row)
        lines.append(lineno)
    if not rows:
        raise ParseError("no data rows")
    _check_widths(rows, lines)
    pts = np.array(rows)
    repeated = len(pts) > 3 and np.array_equal(pts[0], pts[-1])
    if closed is None:
        closed = repeated
    if closed and repeated:
        pts = pts[:-1]
    return PointCloud(pts, closed=closed)


def load_points(path, format: Optional[str] = None, closed: Optional[bool] = None) -> PointCloud:
    """Read a point cloud from a JSON or CSV file (format inferred from the extension)."""
    fmt = (format or infer_format(path)).lower()
    text = Path(path).read_text()
    if fmt == "json":
        return parse_json_points(text, closed)
    if fmt == "csv":
        return parse_csv_points(text, closed)
    raise ValueError(f"unknown input format {format!r}")


def dump_points(cloud: PointCloud) -> str:
    return json.dumps({"points": cloud.points.tolist(), "closed": cloud.closed})


# -- export -------------------------------------------------------------------

def csv_text(samples) -> str:
    n = samples.points.shape[1]
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t"] + [f"x{k + 1}" for k in range(n)] + ["curvature"])
    for t, p, k in zip(samples.t, samples.points, samples.curvature):
        w.writerow([_fmt(t)] + [_fmt(x) for x in p] + [_fmt(k)])
    return out.getvalue()


def obj_text(samples) -> str:
    pts = samples.points
    if pts.shape[1] > 3:
        raise UnsupportedDimension("OBJ vertices have at most three coordinates")
    lines = ["# sampled curve"]
    for p in pts:
        q = list(p) + [0.0] * (3 - len(p))
        lines.append("v " + " ".join(_fmt(x) for x in q))
    m = len(pts)
    for j in range(1, m):
        lines.append(f"l {j} {j + 1}")
    if samples.closed and m > 1:
        lines.append(f"l {m} 1")
    return "\n".join(lines) + "\n"


def _ramp(x):
    # blue -> red through purple
    x = min(1.0, max(0.0, x))
    r, g, b = int(round(40 + 200 * x)), 60, int(round(220 - 180 * x))
    return f"#{r:02x}{g:02x}{b:02x}"


def svg_text(samples, data: Optional[np.ndarray] = None, color_by_curvature: bool = True,
             stroke_width: Optional[float] = None) -> str:
    """SVG in model coordinates (y up): one path for the curve, optional markers
    for the data points and a group of segments coloured by curvature."""
    pts = samples.points
    n = pts.shape[1]
    if n > 3:
        raise UnsupportedDimension("SVG export supports two- and three-dimensional curves")
    if n == 3:
        log.warning("projecting a 3-D curve onto the xy-plane for SVG output")
        pts = pts[:, :2]
        data = None if data is None else np.asarray(data)[:, :2]
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    if data is not None:
        lo = np.minimum(lo, np.min(data, axis=0))
        hi = np.maximum(hi, np.max(data, axis=0))
    size = float(max(hi - lo)) or 1.0
    pad = 0.05 * size
    sw = stroke_width or 0.004 * size
    x0, y0 = lo[0] - pad, -(hi[1] + pad)
    w, h = hi[0] - lo[0] + 2 * pad, hi[1] - lo[1] + 2 * pad
    d = "M " + " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in pts)
    if samples.closed:
        d += " Z"
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">',
        '<g transform="scale(1,-1)">',
        f'<path d="{d}" fill="none" stroke="#333333" stroke-width="{_fmt(sw)}"/>',
    ]
    if color_by_curvature:
        k = np.nan_to_num(np.asarray(samples.curvature, dtype=float), nan=0.0)
        top = float(np.max(k)) if len(k) else 0.0
        seg = [f'<g class="curvature" stroke-width="{_fmt(1.5 * sw)}">']
        m = len(pts)
        pairs = list(zip(range(m - 1), range(1, m)))
        if samples.closed and m > 1:
            pairs.append((m - 1, 0))
        for a, b in pairs:
            level = 0.5 * (k[a] + k[b]) / top if top > 0 else 0.0
            seg.append(f'<line x1="{_fmt(pts[a][0])}" y1="{_fmt(pts[a][1])}" x2="{_fmt(pts[b][0])}" '
                       f'y2="{_fmt(pts[b][1])}" stroke="{_ramp(level)}"/>')
        seg.append("</g>")
        out.extend(seg)
    if data is not None:
        out.append('<g class="data" fill="#000000">')
        for x, y in np.asarray(data)[:, :2]:
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(2.5 * sw)}"/>')
        out.append("</g>")
    out += ["</g>", "</svg>"]
    return "\n".join(out) + "\n"


def export(samples, path, format: Optional[str] = None, data: Optional[Sequence] = None) -> Path:
    """Write samples as CSV, SVG or OBJ (format inferred from the extension)."""
    if len(samples) == 0:
        raise ValueError("nothing to export")
    fmt = (format or infer_format(path, ("csv", "svg", "obj"))).lower()
    if fmt == "csv":
        text = csv_text(samples)
    elif fmt == "obj":
        text = obj_text(samples)
    elif fmt == "svg":
        text = svg_text(samples, None if data is None else np.asarray(data, dtype=float))
    else:
        raise ValueError(f"unknown output format {format!r}")
    path = Path(path)
    path.write_text(text)
    return path
