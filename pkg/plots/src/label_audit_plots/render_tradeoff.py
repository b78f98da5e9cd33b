"""AUC-vs-advantage tradeoff figure from `label-audit tradeoff` CSVs.

Two panels share the AUC axis: the left uses the additive advantage, the
right the 98th-percentile absolute multiplicative advantage.  Single-knob
mechanisms trace one curve; two-knob mechanisms get one curve per bag size.
The no-release row is drawn as the clean-AUC reference line.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from itertools import groupby

import matplotlib.pyplot as plt

from .common import MECHANISM_COLORS, STYLE, require_columns, read_table, save_figure


@dataclass(frozen=True)
class TradeoffSpec:
    inputs: tuple
    out: str


def _curves(rows):
    """Group rows into (label, color, rows) curves, per-k for two-knob PETs."""
    out = []
    single_knob = {"rr": [], "llp": []}
    keyed = sorted(rows, key=lambda r: (r["mechanism"], r["bag_size"]))
    for (mech, k), group in groupby(keyed, key=lambda r: (r["mechanism"], r["bag_size"])):
        if mech in single_knob:
            single_knob[mech].extend(group)
        else:
            out.append((f"{mech} k={k:g}", MECHANISM_COLORS.get(mech), list(group)))
    for mech, group in single_knob.items():
        if group:
            out.append((mech, MECHANISM_COLORS[mech], group))
    return out


def render_tradeoff(spec: TradeoffSpec) -> str:
    rows = []
    for path in spec.inputs:
        table = read_table(path)
        require_columns(
            table,
            ["mechanism", "bag_size", "epsilon", "auc_mean", "additive_adv", "mult_p98"],
            path,
        )
        rows.extend(table)
    clean = [r for r in rows if r["mechanism"] == "null"]
    rows = [r for r in rows if r["mechanism"] != "null"]
    with plt.rc_context(STYLE):
        fig, (ax_add, ax_mult) = plt.subplots(1, 2, figsize=(8.4, 3.4), sharey=True)
        for metric, ax in (("additive_adv", ax_add), ("mult_p98", ax_mult)):
            for label, color, group in _curves(rows):
                pts = sorted(
                    ((r[metric], r["auc_mean"]) for r in group if math.isfinite(r[metric])),
                    key=lambda t: t[0],
                )
                if not pts:
                    continue
                ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                        markersize=3, color=color, label=label, linewidth=1)
            if clean:
                ax.axhline(clean[0]["auc_mean"], color="black", linestyle=":",
                           linewidth=1, label="clean AUC (null)")
            ax.set_ylabel("test AUC")
        ax_add.set_xlabel("additive advantage")
        ax_mult.set_xlabel("98th-pct |multiplicative advantage|")
        ax_mult.legend(loc="lower right")
        fig.tight_layout()
        save_figure(fig, spec.out)
    return spec.out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Render AUC-vs-advantage tradeoff curves.")
    parser.add_argument("--input", action="append", required=True)
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)
    try:
        render_tradeoff(TradeoffSpec(tuple(args.input), args.out))
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
