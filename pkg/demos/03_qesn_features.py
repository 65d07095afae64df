"""A single QESN: circuit statistics, sampled vs exact features, fading memory.

Run: python demos/03_qesn_features.py
"""
import numpy as np

from qesn import QesnParams, init_weights, make_dataset
from qesn.reservoir import circuit_stats, exact_probabilities, expectation_features, sample_counts

ds = make_dataset(n_points=600, split=400)
x = ds.inputs

params = QesnParams(n_qubits=6, shots=20_000, seed=3)
w = init_weights(params)
print("circuit:", circuit_stats(w, params, x))

t, counts = sample_counts(x[:60], w, params)
_, exact = exact_probabilities(x[:60], w, params)
tv = 0.5 * np.abs(counts / params.shots - exact).sum(1)
print(f"first row t = {t[0]}; sampled vs exact TV: mean {tv.mean():.4f}, max {tv.max():.4f}")
print("expectation features of row 0:", np.round(expectation_features(exact[:1])[0], 3))

# two different initial memory states converge under the same input
psi = np.random.default_rng(1).normal(size=8) + 1j * np.random.default_rng(2).normal(size=8)
_, a = exact_probabilities(x, w, params)
_, b = exact_probabilities(x, w, params, initial_memory=psi / np.linalg.norm(psi))
d = 0.5 * np.abs(a - b).sum(1)
for step in (0, 10, 50, 100, 300):
    print(f"step {step:>3}: TV between runs {d[step]:.2e}")
