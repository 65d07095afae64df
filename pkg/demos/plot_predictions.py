"""Plot predicted vs true y and z from a fit-report output directory.

Needs matplotlib, which the package itself does not depend on.

Run: python demos/plot_predictions.py runs/smoke [group]
"""
import os
import sys

import matplotlib.pyplot as plt
import numpy as np

out = sys.argv[1] if len(sys.argv) > 1 else "runs/smoke"
pred_dir = os.path.join(out, "predictions")
groups = [sys.argv[2]] if len(sys.argv) > 2 else sorted(f[:-4] for f in os.listdir(pred_dir))

fig, axes = plt.subplots(len(groups), 2, figsize=(11, 2.2 * len(groups)), squeeze=False)
for row, g in zip(axes, groups):
    with open(os.path.join(pred_dir, g + ".csv")) as f:
        lines = [line for line in f if not line.startswith("#")]
    tab = np.loadtxt(lines[1:], delimiter=",")
    for ax, (i, name) in zip(row, ((1, "y"), (3, "z"))):
        ax.plot(tab[:, 0], tab[:, i], "k", lw=0.8, label="true")
        ax.plot(tab[:, 0], tab[:, i + 1], "r", lw=0.8, label="predicted")
        ax.set_title(f"{g}: {name}", fontsize=9)
axes[0, 0].legend(fontsize=8)
fig.tight_layout()
path = os.path.join(out, "predictions.png")
fig.savefig(path, dpi=120)
print("wrote", path)
