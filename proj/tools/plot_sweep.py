#!/usr/bin/env python3
"""Plot total_cycles against replications for each mode in a sweep CSV.

Usage: plot_sweep.py sweep.csv [-o out.png] [--log]
"""
import argparse
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

STYLES = {"sequential": "o-", "tlp": "s-", "wlp": "^-"}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv_path")
    ap.add_argument("-o", "--out", help="write a PNG instead of showing a window")
    ap.add_argument("--log", action="store_true", help="log-log axes")
    args = ap.parse_args()

    curves = defaultdict(list)
    models = set()
    with open(args.csv_path, newline="") as f:
        for row in csv.DictReader(f):
            curves[row["mode"]].append((int(row["replications"]), int(row["total_cycles"])))
            models.add(row["model"])

    if not curves:
        raise SystemExit("no rows in " + args.csv_path)

    fig, ax = plt.subplots(figsize=(8, 5))
    for mode, pts in sorted(curves.items()):
        pts.sort()
        ax.plot([r for r, _ in pts], [c for _, c in pts],
                STYLES.get(mode, "x-"), markersize=3, label=mode)
    if args.log:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel("replications")
    ax.set_ylabel("total cycles")
    ax.set_title(", ".join(sorted(models)) + " cost curves")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()

    if args.out:
        fig.savefig(args.out, dpi=150)
        print("wrote", args.out)
    else:
        plt.show()


if __name__ == "__main__":
    main()
