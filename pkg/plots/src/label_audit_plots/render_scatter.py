"""Prior-vs-posterior scatter figure from `label-audit scatter` CSVs.

One point per audited example; the dotted y=x line marks zero leakage, and
distance from it shows how much the release moved the attacker's belief.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import matplotlib.pyplot as plt

from .common import MECHANISM_COLORS, STYLE, require_columns, read_table, save_figure, series_label


@dataclass(frozen=True)
class ScatterSpec:
    inputs: tuple
    out: str
    point_size: float = 4.0
    alpha: float = 0.35


def render_scatter(spec: ScatterSpec) -> str:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.2, 4.2))
        for path in spec.inputs:
            rows = read_table(path)
            require_columns(rows, ["mechanism", "prior", "posterior"], path)
            priors = [r["prior"] for r in rows]
            posts = [r["posterior"] for r in rows]
            color = MECHANISM_COLORS.get(rows[0]["mechanism"])
            ax.scatter(priors, posts, s=spec.point_size, alpha=spec.alpha,
                       color=color, label=series_label(rows[0]), linewidths=0)
        ax.plot([0, 1], [0, 1], linestyle=":", color="black", linewidth=1)
        ax.set_xlim(-0.02, 1.02)
        ax.set_ylim(-0.02, 1.02)
        ax.set_xlabel("prior P(y=1 | x)")
        ax.set_ylabel("posterior P(y=1 | x, release)")
        ax.legend(loc="upper left")
        fig.tight_layout()
        save_figure(fig, spec.out)
    return spec.out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Render a prior-posterior scatter plot.")
    parser.add_argument("--input", action="append", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--point-size", type=float, default=4.0)
    parser.add_argument("--alpha", type=float, default=0.35)
    args = parser.parse_args(argv)
    try:
        render_scatter(ScatterSpec(tuple(args.input), args.out, args.point_size, args.alpha))
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
