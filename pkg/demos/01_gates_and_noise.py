"""Gates, mid-circuit measurement and depolarizing noise on small registers.

Run: python demos/01_gates_and_noise.py
"""
import numpy as np

from qesn.quantum import (
    apply_gate,
    dm_depolarize,
    dm_from_state,
    dm_measure_reset_channel,
    measure_collapse_reset,
)
from qesn.quantum import gates as G

rng = np.random.default_rng(0)

# Bell pair: H on qubit 0 is RY(pi/2) followed by RZ(pi) up to a phase
psi = np.zeros(4, complex)
psi[0] = 1
psi = apply_gate(psi, G.rotation(0, 0.0, np.pi / 2, np.pi))
psi = apply_gate(psi, G.cnot(0, 1))
print("Bell amplitudes:", np.round(psi, 3))

# measure qubit 1 on many copies, reset it to |0>
batch = np.tile(psi, (10_000, 1))
bits = measure_collapse_reset(batch, [1], rng)
print("P(qubit 1 = 1) sampled:", bits.mean())

# the same thing as a channel on the density matrix
rho, probs = dm_measure_reset_channel(dm_from_state(psi), [1])
print("outcome probabilities (channel):", np.round(probs, 3))
print("qubit 0 is now classically correlated, off-diagonals:", np.round(rho[0, 2], 3))

# full depolarization of |0> pushes <Z> to -1/3 under the p/3 Pauli convention
rho0 = dm_from_state(np.array([1, 0], complex))
for p in (0.0, 0.1, 0.5, 1.0):
    r = dm_depolarize(rho0, 0, p)
    print(f"p = {p:.1f}  <Z> = {np.real(r[0, 0] - r[1, 1]):+.4f}")
