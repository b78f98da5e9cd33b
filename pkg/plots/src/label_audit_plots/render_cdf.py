"""Advantage CDF figure from `label-audit cdf` CSVs.

Step plots per mechanism for one measure (absolute multiplicative or
additive).  Mass sitting at +infinity shows up as a plateau below 1 over
the finite support, annotated with its size.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import matplotlib.pyplot as plt

from .common import MECHANISM_COLORS, STYLE, require_columns, read_table, save_figure, series_label


@dataclass(frozen=True)
class CdfSpec:
    inputs: tuple
    out: str
    measure: str = "mult"


def render_cdf(spec: CdfSpec) -> str:
    if spec.measure not in ("mult", "add"):
        raise ValueError(f"unknown measure {spec.measure!r}")
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.6, 3.4))
        for path in spec.inputs:
            rows = read_table(path)
            require_columns(rows, ["mechanism", "measure", "value", "cdf", "infinite_mass"], path)
            rows = [r for r in rows if r["measure"] == spec.measure]
            if not rows:
                raise ValueError(f"{path}: no rows for measure {spec.measure!r}")
            finite = [r for r in rows if math.isfinite(r["value"])]
            color = MECHANISM_COLORS.get(rows[0]["mechanism"])
            label = series_label(rows[0])
            mass = rows[0]["infinite_mass"]
            if mass > 0:
                label += f" (inf mass {mass:.2f})"
            xs = [r["value"] for r in finite]
            ys = [r["cdf"] for r in finite]
            if xs:
                ax.step([xs[0]] + xs, [0.0] + ys, where="post", color=color, label=label)
                if mass > 0:
                    ax.hlines(1.0 - mass, xs[-1], xs[-1] * 1.15 + 0.1, color=color,
                              linestyle="--", linewidth=1)
        ax.set_ylim(0, 1.02)
        ax.set_xlabel(
            "|multiplicative advantage|" if spec.measure == "mult" else "additive gap"
        )
        ax.set_ylabel("empirical CDF")
        ax.legend(loc="lower right")
        fig.tight_layout()
        save_figure(fig, spec.out)
    return spec.out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Render advantage CDF step plots.")
    parser.add_argument("--input", action="append", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--measure", choices=["mult", "add"], default="mult")
    args = parser.parse_args(argv)
    try:
        render_cdf(CdfSpec(tuple(args.input), args.out, args.measure))
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
