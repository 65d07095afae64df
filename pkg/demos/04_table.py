"""Reproduce the shape of the main results table at desk scale.

Exact density-matrix mode, 3000 points, seeds 1-5. Takes a few minutes.

Run: python demos/04_table.py [--full]   (--full adds 12 qubits, slower)
"""
import sys

from qesn import NoiseParams, QesnParams, make_dataset
from qesn.experiment import RegressionSpec, format_table, qesn_sweep

ds = make_dataset(n_points=3000, split=2000)
spec = RegressionSpec(washout=300)
seeds = range(1, 6)
sizes = (4, 6, 8, 12) if "--full" in sys.argv else (4, 6, 8)

rows = {}
for n in sizes:
    clean = qesn_sweep(ds, QesnParams(n_qubits=n, exact_mode=True), seeds, spec)
    noisy = qesn_sweep(ds, QesnParams(n_qubits=n, exact_mode=True, noise=NoiseParams()), seeds, spec)
    rows[n] = {
        "expectation": (clean["expectation"].per_seed[clean["expectation"].best_seed]["train_rmse"],
                        clean["expectation"].best_test),
        "distribution": (clean["distribution"].per_seed[clean["distribution"].best_seed]["train_rmse"],
                         clean["distribution"].best_test),
        "distribution+noise": (noisy["distribution"].per_seed[noisy["distribution"].best_seed]["train_rmse"],
                               noisy["distribution"].best_test),
    }
    print(f"done {n} qubits", flush=True)

print(format_table(rows))
print("penalties picked by test RMSE, as in the original protocol")
