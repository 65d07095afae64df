"""Parametric noise: depolarizing gates plus readout bit-flips.

Stands in for a calibrated device model. Trajectories unravel the
depolarizing channel into random Pauli kicks; the density-matrix mode applies
the channel exactly.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import ConfigError
from . import kernels
from .density import dm_num_qubits
from .gates import PAULIS
from .statevector import check_qubits, num_qubits


@dataclass(frozen=True)
class NoiseParams:
    p_depol_1q: float = 2e-4
    p_depol_2q: float = 3e-3
    p_readout_flip: float = 1e-2

    def __post_init__(self):
        for name, p in asdict(self).items():
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {p}")


def _check_p(p):
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"probability must lie in [0, 1], got {p}")


def stochastic_pauli_inplace(arr, q, n, p, u):
    """Kick rows of ``arr`` with X, Y or Z on ``q``; ``u`` has one uniform per row."""
    if p <= 0.0:
        return arr
    hit = np.flatnonzero(u < p)
    if hit.size == 0:
        return arr
    which = np.minimum((u[hit] / p * 3.0).astype(np.int64), 2)
    for k, pauli in enumerate(PAULIS):
        rows = hit[which == k]
        if rows.size:
            sub = np.ascontiguousarray(arr[rows])
            kernels.apply_single(sub, pauli, q, n)
            arr[rows] = sub
    return arr


def apply_stochastic_pauli(state, qubits, p, rng):
    """Independently on each listed qubit, apply a uniformly chosen Pauli with probability ``p``.

    Returns a new state. One uniform is drawn per qubit per row whatever ``p``
    is, so the random stream advances identically with and without noise.
    """
    _check_p(p)
    n = num_qubits(state)
    qubits = check_qubits(sorted(qubits), n)
    out = np.array(state, dtype=complex, copy=True, order="C")
    arr = out.reshape(-1, out.shape[-1])
    for q in qubits:
        u = rng.random((arr.shape[0],))
        stochastic_pauli_inplace(arr, q, n, p, u)
    return out


def depolarize_inplace(vec, q, n, p):
    """Exact depolarizing channel on qubit ``q`` of the ``(1, 4**n)`` view of a density matrix.

    Uses rho -> (1 - 4p/3) rho + (4p/3) Tr_q(rho) (x) I/2.
    """
    if p <= 0.0:
        return vec
    lam = 1.0 - 4.0 * p / 3.0
    v = vec.reshape(1 << q, 2, 1 << (n - 1), 2, 1 << (n - q - 1))
    d0 = v[:, 0, :, 0, :].copy()
    d1 = v[:, 1, :, 1, :].copy()
    mix = (2.0 * p / 3.0) * (d0 + d1)
    v[:, 0, :, 1, :] *= lam
    v[:, 1, :, 0, :] *= lam
    v[:, 0, :, 0, :] = lam * d0 + mix
    v[:, 1, :, 1, :] = lam * d1 + mix
    return vec


def dm_depolarize(dm, qubit, p):
    """rho -> (1-p) rho + (p/3)(X rho X + Y rho Y + Z rho Z) on ``qubit``."""
    _check_p(p)
    n = dm_num_qubits(dm)
    check_qubits([qubit], n)
    out = np.array(dm, dtype=complex, copy=True, order="C")
    depolarize_inplace(out.reshape(1, -1), int(qubit), n, p)
    return out


def readout_bitflip(bits, p_flip, rng):
    """Flip each bit independently with probability ``p_flip``."""
    _check_p(p_flip)
    bits = np.asarray(bits, dtype=np.uint8)
    b2 = bits.reshape(-1, bits.shape[-1]) if bits.ndim else bits.reshape(1, 1)
    flips = rng.random(b2.shape) < p_flip
    return (b2 ^ flips.astype(np.uint8)).reshape(bits.shape)


def bitflip_index_inplace(outcome, k, p_flip, u):
    """Index form of :func:`readout_bitflip`; ``u`` has shape ``(L, k)``, column 0 = first bit."""
    flips = (u < p_flip).astype(np.int64)
    mask = (flips << np.arange(k - 1, -1, -1)).sum(axis=1)
    outcome ^= mask
    return outcome


def readout_transition(probs, p_flip):
    """Push an outcome distribution through independent bit-flips on every bit."""
    _check_p(p_flip)
    probs = np.asarray(probs, dtype=float)
    k = num_qubits(probs)
    if p_flip == 0.0:
        return probs.copy()
    t = np.array([[1.0 - p_flip, p_flip], [p_flip, 1.0 - p_flip]])
    out = probs.reshape(-1, probs.shape[-1]).astype(float, copy=True)
    for q in range(k):
        kernels.apply_single(out, t, q, k)
    return out.reshape(probs.shape)
