#!/usr/bin/env python3
"""Generated convergence and success-rate plots for 'terrain_2d'.

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
ENV_NAME = 'terrain_2d'
AXIS = 'elapsed_ms'
CHECKPOINTS = [19.53125, 24.856279540724213, 31.63313318945921, 40.25763846687537, 51.23354190756178, 65.20193226320718, 82.97868569239772, 105.6021200635971, 134.3936417993673, 171.03492756792477, 217.66614890781975, 277.01097696285046, 352.53566869697187, 448.6515266154531, 570.9725574106307, 726.6433790505395, 924.7565289521473, 1176.8835476861127, 1497.750858146062, 1906.0999174368317, 2425.7818818744945, 3087.1507231076616, 3928.8361655251406, 5000.0]
SAMPLERS = ['relevant', 'transition:0.1', 'transition:1', 'transition:10']
TRIALS = 50

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
