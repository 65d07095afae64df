"""Classical comparators: a small ESN tuned over the grid, and a windowed linear model.

Run: python demos/05_baselines.py
"""
from qesn import make_dataset
from qesn.experiment import RegressionSpec, evaluate_baseline, evaluate_esn

ds = make_dataset(n_points=3000, split=2000)
spec = RegressionSpec(washout=300)

lin = evaluate_baseline(ds, spec)
print(f"linear (4-sample window): test RMSE {lin.test:.4f}")
for nodes in (2, 4, 8):
    for seed in (1, 2, 3):
        best, params = evaluate_esn(ds, nodes, seed, spec)
        print(f"ESN {nodes} nodes, seed {seed}: test RMSE {best.test:.4f} "
              f"(radius {params.spectral_radius}, input scale {params.input_scale})")
