"""Slope fits and lossless CSV/JSON emission for sweep results."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["SlopeFit", "fit_slope", "format_value", "rows_to_csv", "csv_to_rows"]


@dataclass(frozen=True)
class SlopeFit:
    exponent: float
    intercept: float
    r_squared: float
    points_used: int


def fit_slope(points):
    """Least-squares line through (log x, log y); the exponent is its slope.

    Needs at least three strictly positive points.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points for a slope fit")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ValueError("slope fit needs strictly positive coordinates")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    total = ly - ly.mean()
    ss_tot = float(total @ total)
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(resid @ resid) / ss_tot
    return SlopeFit(exponent=float(slope), intercept=float(intercept),
                    r_squared=min(max(r2, 0.0), 1.0), points_used=len(pts))


def format_value(v):
    """CSV cell: 17 significant digits for floats (lossless round trip)."""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        return format(v, ".17g")
    return str(v)


def rows_to_csv(rows, columns):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[c]) for c in columns])
    return buf.getvalue()


def _parse_cell(text):
    if text == "":
        return float("nan")
    try:
        iv = int(text)
        return iv
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    if text in ("true", "false"):
        return text == "true"
    return text


def csv_to_rows(text):
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return [dict(zip(header, (_parse_cell(c) for c in row))) for row in reader]
