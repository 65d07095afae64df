"""The Lorenz-63 dataset: integrate, drop the transient, normalize on train rows.

Run: python demos/02_lorenz_data.py
"""
import numpy as np

from qesn.lorenz import LorenzParams, make_dataset, rk4_integrate

ds = make_dataset()
print(f"{len(ds)} points, split at {ds.split_index}")
print("train mean", np.round(ds.samples[:ds.split_index].mean(0), 12))
print("train std ", np.round(ds.samples[:ds.split_index].std(0), 6))
print("test mean (not zero; normalization only sees train rows)", np.round(ds.samples[ds.split_index:].mean(0), 3))

# RK4 is fourth order: halving dt cuts the error by about 16
x0 = rk4_integrate(LorenzParams(n_steps=501))[0]


def at_t1(dt):
    return rk4_integrate(LorenzParams(dt=dt, n_steps=int(round(1 / dt)) + 1, transient_skip=0,
                                      initial=tuple(x0)))[-1]


ref = at_t1(0.0005)
e1, e2 = np.linalg.norm(at_t1(0.02) - ref), np.linalg.norm(at_t1(0.01) - ref)
print(f"error dt=0.02: {e1:.2e}, dt=0.01: {e2:.2e}, ratio {e1 / e2:.1f}")
