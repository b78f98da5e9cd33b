"""Shared CSV parsing and figure plumbing.

These scripts never recompute statistics: every number is read from the
label-audit CSV outputs, whose schemas are the contract.  Rendering is
deterministic (fixed style, metadata stripped) so identical inputs give
identical image bytes.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "figure.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 8,
    "svg.hashsalt": "label-audit",  # stable element ids across processes
}

MECHANISM_COLORS = {
    "null": "black",
    "rr": "dimgrey",
    "llp": "tab:blue",
    "llp-lap": "tab:green",
    "llp-geom": "tab:orange",
}


class SchemaError(ValueError):
    pass


def _to_float(text: str) -> float:
    if text == "":
        return math.nan
    return float(text)


def read_table(path) -> list[dict]:
    """Parse a label-audit CSV: `#` config line, header, typed rows."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    body = [l for l in lines if l and not l.startswith("#")]
    if not body:
        raise SchemaError(f"{path}: no rows")
    header = body[0].split(",")
    rows = []
    for line in body[1:]:
        parts = line.split(",")
        if len(parts) != len(header):
            raise SchemaError(f"{path}: ragged row")
        row = {}
        for name, value in zip(header, parts):
            if name in ("mechanism", "measure"):
                row[name] = value
            elif value in ("true", "false"):
                row[name] = value == "true"
            else:
                row[name] = _to_float(value)
        rows.append(row)
    if not rows:
        raise SchemaError(f"{path}: empty table")
    return rows


def require_columns(rows: list[dict], columns, path) -> None:
    missing = [c for c in columns if c not in rows[0]]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}")


def series_label(row: dict) -> str:
    mech = row["mechanism"]
    if mech == "null":
        return "null"
    if mech == "rr":
        return f"rr eps={row['epsilon']:g}"
    if mech == "llp":
        return f"llp k={row['bag_size']:g}"
    return f"{mech} k={row['bag_size']:g} eps={row['epsilon']:g}"


def save_figure(fig, out_path) -> None:
    """Write PNG/SVG without volatile metadata."""
    out_path = str(out_path)
    if out_path.endswith(".svg"):
        metadata = {"Date": None}
    else:
        metadata = {"Software": None}
    fig.savefig(out_path, metadata=metadata)
    plt.close(fig)
