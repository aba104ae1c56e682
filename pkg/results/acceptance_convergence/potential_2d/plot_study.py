#!/usr/bin/env python3
"""Generated convergence and success-rate plots for 'potential_2d'.

Reads 'records.csv' next to this script and renders:
  * best cost vs elapsed_ms (median line, interquartile band) per sampler
  * success-rate bar chart per sampler
"""
import csv
import math
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
CSV_PATH = os.path.join(HERE, 'records.csv')
ENV_NAME = 'potential_2d'
AXIS = 'elapsed_ms'
CHECKPOINTS = [39.0625, 49.71255908144843, 63.26626637891843, 80.51527693375076, 102.46708381512357, 130.4038645264144, 165.95737138479538, 211.20424012719423, 268.78728359873463, 342.06985513584954, 435.33229781563955, 554.021953925701, 705.0713373939438, 897.3030532309064, 1141.9451148212613, 1453.2867581010792, 1849.5130579042948, 2353.767095372226, 2995.5017162921245, 3812.199834873664, 4851.563763748989, 6174.301446215324, 7857.672331050282, 10000.0]
SAMPLERS = ['relevant', 'informed']
TRIALS = 20

series = {label: {} for label in SAMPLERS}
with open(CSV_PATH, newline="") as fh:
    for row in csv.DictReader(fh):
        label = row["sampler"]
        if label not in series:
            continue
        t = float(row[AXIS])
        cost = float(row["best_cost"]) if row["best_cost"] else math.inf
        series[label].setdefault(int(row["trial"]), []).append((t, cost))


def best_at(points, t):
    best = math.inf
    for tt, c in points:
        if tt <= t and c < best:
            best = c
    return best


fig, ax = plt.subplots(figsize=(7, 4.5))
for label in SAMPLERS:
    trials = series[label]
    med, q1, q3, xs = [], [], [], []
    for t in CHECKPOINTS:
        vals = [best_at(trials.get(k, []), t) for k in range(TRIALS)]
        lo, m, hi = np.percentile(vals, [25.0, 50.0, 75.0])
        if math.isfinite(m):
            xs.append(t)
            med.append(m)
            q1.append(lo if math.isfinite(lo) else m)
            q3.append(hi if math.isfinite(hi) else m)
    if xs:
        (line,) = ax.plot(xs, med, label=label)
        ax.fill_between(xs, q1, q3, alpha=0.2, color=line.get_color())
ax.set_xscale("log")
ax.set_xlabel(AXIS)
ax.set_ylabel("best solution cost")
ax.set_title(f"Convergence: {ENV_NAME}")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(HERE, f"convergence_{ENV_NAME}.png"), dpi=160)

fig2, ax2 = plt.subplots(figsize=(6, 4))
rates = []
for label in SAMPLERS:
    trials = series[label]
    ok = sum(
        1 for k in range(TRIALS) if math.isfinite(best_at(trials.get(k, []), math.inf))
    )
    rates.append(100.0 * ok / TRIALS)
ax2.bar(range(len(SAMPLERS)), rates)
ax2.set_xticks(range(len(SAMPLERS)))
ax2.set_xticklabels(SAMPLERS, rotation=20, ha="right")
ax2.set_ylabel("successful trials [%]")
ax2.set_ylim(0, 105)
ax2.set_title(f"Success rate: {ENV_NAME}")
fig2.tight_layout()
fig2.savefig(os.path.join(HERE, f"success_rate_{ENV_NAME}.png"), dpi=160)
print("wrote plots next to", CSV_PATH)
