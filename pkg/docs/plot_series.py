#!/usr/bin/env python3
"""Plot a ``*.series.csv`` written by ``zipfkit fig`` on log-log axes.

Needs matplotlib, which zipfkit itself does not depend on:

    python docs/plot_series.py out/fig1.series.csv out/fig1.png
"""

import csv
import json
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib.pyplot as plt


def main(series_csv, png):
    series = defaultdict(lambda: ([], []))
    with open(series_csv, encoding="utf-8") as fh:
        for row in csv.DictReader(line for line in fh if not line.startswith("#")):
            r, f = series[row["series"]]
            r.append(int(row["rank"]))
            f.append(float(row["frequency"]))
    fits = {}
    fit_json = Path(series_csv).with_name(Path(series_csv).name.replace(".series.csv", ".fit.json"))
    if fit_json.exists():
        fits = json.loads(fit_json.read_text()).get("fits", {})
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for name, (r, f) in series.items():
        label = name
        fit = fits.get(name, {}).get("fit")
        if fit:
            label += f" (alpha={fit['alpha']:.2f})"
        ax.loglog(r, f, ".", ms=2, label=label)
    ax.set_xlabel("rank")
    ax.set_ylabel("frequency")
    ax.legend()
    fig.tight_layout()
    fig.savefig(png, dpi=150)


if __name__ == "__main__":
    main(*sys.argv[1:3])
