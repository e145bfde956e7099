"""CSV and JSON-lines report emission with a companion plot script.

Floats are written with 17 significant digits so CSV values round-trip
exactly.  The plot script is written, never executed: it reads the CSV and
draws the columns with matplotlib when a user runs it.
"""

from __future__ import annotations

import csv
import json
import math
import os
from typing import Iterable, Sequence

__all__ = ["SchemaError", "emit_report", "read_csv", "format_value", "DIAGNOSTICS_SCHEMA"]

DIAGNOSTICS_SCHEMA = ("iter", "residual", "rho", "I0", "I1")


class SchemaError(ValueError):
    pass


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return "%.17g" % v
    if hasattr(v, "item"):
        return format_value(v.item())
    return str(v)


def _json_value(v):
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


_PLOT_TEMPLATE = '''"""Plot {csv_name}: first column on the x axis, the rest as series."""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

COLUMNS = {columns!r}
X = COLUMNS[0]
Y = {ycols!r}


def main(out="{stem}.png"):
    with open("{csv_name}", newline="") as fh:
        rows = list(csv.DictReader(fh))
    fig, ax = plt.subplots()
    xs = [float(r[X]) for r in rows]
    for col in Y:
        try:
            ys = [float(r[col]) for r in rows]
        except ValueError:
            continue
        ax.plot(xs, ys, marker="o", label=col)
    ax.set_xlabel(X)
    ax.legend()
    fig.savefig(out)


if __name__ == "__main__":
    main(*sys.argv[1:])
'''


def emit_report(rows: Iterable[dict], schema: Sequence[str], destination: str):
    """Write ``destination.csv``, ``destination.jsonl`` and ``destination_plot.py``.

    Every row must have exactly the schema's keys.  Returns the three paths.
    """
    schema = list(schema)
    if not schema or len(set(schema)) != len(schema):
        raise SchemaError("schema must be a non-empty list of distinct column names")
    rows = list(rows)
    for i, r in enumerate(rows):
        if set(r) != set(schema):
            extra = sorted(set(r) - set(schema))
            missing = sorted(set(schema) - set(r))
            raise SchemaError(f"row {i} does not match schema (missing {missing}, extra {extra})")
    d = os.path.dirname(destination)
    if d:
        os.makedirs(d, exist_ok=True)
    csv_path = destination + ".csv"
    jsonl_path = destination + ".jsonl"
    plot_path = destination + "_plot.py"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(schema)
        for r in rows:
            w.writerow([format_value(r[k]) for k in schema])
    with open(jsonl_path, "w", encoding="utf-8") as fh:
        for r in rows:
            fh.write(json.dumps({k: _json_value(r[k]) for k in schema}) + "\n")
    stem = os.path.basename(destination)
    with open(plot_path, "w", encoding="utf-8") as fh:
        fh.write(_PLOT_TEMPLATE.format(csv_name=stem + ".csv", stem=stem, columns=tuple(schema),
                                       ycols=tuple(schema[1:])))
    return csv_path, jsonl_path, plot_path


def read_csv(path: str):
    """Header and rows as strings."""
    with open(path, newline="", encoding="utf-8") as fh:
        r = list(csv.reader(fh))
    return r[0], r[1:]
