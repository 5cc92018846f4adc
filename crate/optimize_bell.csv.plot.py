#!/usr/bin/env python3
"""Plot a Bell-parameter sweep produced by `fakebell sweep-bell`."""
import csv
import math
import matplotlib.pyplot as plt

xs, ys = [], []
with open("optimize_bell.csv") as fh:
    for row in csv.DictReader(r for r in fh if not r.startswith("#")):
        xs.append(float(row["tanh_chi"]))
        ys.append(float(row["bell_max"]))

fig, ax = plt.subplots()
ax.plot(xs, ys, marker="o", ms=3, label="maximal Bell parameter")
ax.axhline(2 * math.sqrt(2), ls="--", c="gray", label="quantum bound 2√2")
ax.axhline(2.0, ls=":", c="gray", label="local-realism bound 2")
ax.set_xlabel(r"tanh $\chi$")
ax.set_ylabel("Bell parameter")
ax.legend()
fig.savefig("optimize_bell.csv.png", dpi=160, bbox_inches="tight")
print("wrote", "optimize_bell.csv.png")
