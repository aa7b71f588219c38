#!/usr/bin/env python3
"""Export the walk angle distributions for n = 10 and n = 100 (n_max = 100)
and, if matplotlib is available, draw them as bar charts.

    python scripts/walk_figures.py --out results/walk
"""

import argparse
import math
from pathlib import Path

from hqea.bench_cli import cmd_walkdist


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/walk"))
    ap.add_argument("--n-max", type=int, default=100)
    ap.add_argument("--steps", type=int, nargs="+", default=[10, 100])
    ap.add_argument("--no-plot", action="store_true")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    series = {}
    for n in args.steps:
        path = args.out / f"walk_n{n}_nmax{args.n_max}.csv"
        series[n] = cmd_walkdist(n, args.n_max, path)
        print(f"wrote {path} ({len(series[n])} rows)")

    if args.no_plot:
        return
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; CSVs only")
        return
    fig, axes = plt.subplots(1, len(series), figsize=(5 * len(series), 3.5))
    for ax, (n, rows) in zip(list(getattr(axes, "flat", [axes])), series.items()):
        angles = [a / math.pi for _, a, _ in rows]
        probs = [p for _, _, p in rows]
        ax.bar(angles, probs, width=2 / args.n_max)
        ax.set_xlim(-1, 1)
        ax.set_xlabel("rotation angle / pi")
        ax.set_ylabel("probability")
        ax.set_title(f"n={n}, n_max={args.n_max}")
    fig.tight_layout()
    png = args.out / "walk_distributions.png"
    fig.savefig(png, dpi=120)
    print(f"wrote {png}")


if __name__ == "__main__":
    main()
