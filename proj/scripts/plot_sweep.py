#!/usr/bin/env python3
"""Plot sweep CSV output (untested dev tooling; CSV is the real interface).

Usage:
    python3 scripts/plot_sweep.py results.csv --x delta [--y bob_trace] [-o out.png]

Draws one line per (algorithm, k, r, budget) group over the chosen x axis,
skipping infeasible rows. Feasibility output (delta_min column) is drawn as
vertical cutoff lines when plotting against delta.
"""

import argparse
import csv
import sys
from collections import defaultdict


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv_path")
    ap.add_argument("--x", default="delta", choices=["delta", "budget", "r", "k"])
    ap.add_argument("--y", default="bob_trace",
                    choices=["bob_trace", "eve_trace", "avg_mse", "delta_min"])
    ap.add_argument("-o", "--output", default=None, help="write PNG instead of showing")
    ap.add_argument("--logx", action="store_true")
    ap.add_argument("--logy", action="store_true")
    args = ap.parse_args()

    import matplotlib
    if args.output:
        matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    groups = defaultdict(list)
    cutoffs = {}
    with open(args.csv_path, newline="") as fh:
        for row in csv.DictReader(fh):
            key_fields = [f for f in ("algorithm", "k", "r", "budget") if f != args.x]
            key = ", ".join(f"{f}={row[f]}" for f in key_fields)
            if args.x == "delta" and row.get("delta_min"):
                cutoffs[key] = float(row["delta_min"])
            if row["feasible"] != "true" or not row.get(args.y):
                continue
            groups[key].append((float(row[args.x]), float(row[args.y])))

    if not groups and not cutoffs:
        print("no feasible rows with the requested columns", file=sys.stderr)
        return 1

    fig, ax = plt.subplots(figsize=(7, 5))
    for key in sorted(groups):
        pts = sorted(groups[key])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=key)
    for key, x in sorted(cutoffs.items()):
        ax.axvline(x, linestyle=":", alpha=0.5)
    if args.logx:
        ax.set_xscale("log")
    if args.logy:
        ax.set_yscale("log")
    ax.set_xlabel(args.x)
    ax.set_ylabel(args.y)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    if args.output:
        fig.savefig(args.output, dpi=150)
        print(f"wrote {args.output}")
    else:
        plt.show()
    return 0


if __name__ == "__main__":
    sys.exit(main())
