"""CSV output in the fixed long format shared by ``sweep``, ``compare`` and ``figure``."""

from __future__ import annotations

import csv
import io
import math

HEADER = ("param", "value", "engine", "metric", "estimate", "ci_half_width", "status")


def fmt(x) -> str:
    """Nine significant digits; infinities as ``inf``/``-inf``, NaN as ``nan``."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.9g}"


def write_rows(rows, stream) -> int:
    """Write ``(param, value, engine, metric, estimate, ci, status)`` tuples; returns count."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(HEADER)
    n = 0
    for param, value, engine, metric, estimate, ci, status in rows:
        writer.writerow((param, fmt(value), engine, metric, fmt(estimate), fmt(ci), status))
        n += 1
    return n


def rows_to_text(rows) -> str:
    buf = io.StringIO()
    write_rows(rows, buf)
    return buf.getvalue()


def read_rows(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames!r}")
    return list(reader)
