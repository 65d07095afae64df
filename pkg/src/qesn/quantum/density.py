"""Exact density-matrix mode, the shot-noise-free mirror of the trajectory path."""
from __future__ import annotations

import numpy as np

from ..errors import CapacityError, ShapeError
from . import kernels
from .gates import ROTATION, Gate
from .statevector import check_qubits, num_qubits

MAX_DM_QUBITS = 12


def dm_num_qubits(dm):
    if dm.ndim != 2 or dm.shape[0] != dm.shape[1]:
        raise ShapeError(f"density matrix must be square, got {dm.shape}")
    n = num_qubits(dm[0])
    if n > MAX_DM_QUBITS:
        raise CapacityError(f"density-matrix mode supports at most {MAX_DM_QUBITS} qubits")
    return n


def dm_from_state(state):
    psi = np.asarray(state, dtype=complex)
    if psi.ndim != 1:
        raise ShapeError("dm_from_state takes a single state")
    if num_qubits(psi) > MAX_DM_QUBITS:
        raise CapacityError(f"density-matrix mode supports at most {MAX_DM_QUBITS} qubits")
    return np.outer(psi, psi.conj())


def init_dm(n_qubits):
    if not 1 <= n_qubits <= MAX_DM_QUBITS:
        raise CapacityError(f"density-matrix mode supports 1..{MAX_DM_QUBITS} qubits")
    dm = np.zeros((1 << n_qubits, 1 << n_qubits), dtype=complex)
    dm[0, 0] = 1.0
    return dm


def dm_apply_gate_inplace(vec, gate, n):
    """``vec`` is the ``(1, 4**n)`` row-major view of a density matrix."""
    u = gate.target_matrix()
    uc = u.conj()
    if gate.kind == ROTATION:
        q = gate.qubits[0]
        kernels.apply_single(vec, u, q, 2 * n)
        kernels.apply_single(vec, uc, q + n, 2 * n)
    else:
        c, t = gate.qubits
        kernels.apply_controlled(vec, u, c, t, 2 * n)
        kernels.apply_controlled(vec, uc, c + n, t + n, 2 * n)
    return vec


def dm_apply_gate(dm, gate: Gate):
    """rho -> U rho U^dagger, returned as a new matrix."""
    n = dm_num_qubits(dm)
    check_qubits(gate.qubits, n)
    out = np.array(dm, dtype=complex, copy=True, order="C")
    dm_apply_gate_inplace(out.reshape(1, -1), gate, n)
    return out


def _split_perm(qubits, n):
    rest = [q for q in range(n) if q not in qubits]
    perm = rest + list(qubits) + [n + q for q in rest] + [n + q for q in qubits]
    return perm, len(rest)


def dm_measure_reset_channel(dm, qubits):
    """Deterministic measure-and-reset channel.

    Returns ``(dm_out, probs)``: ``probs`` is the outcome distribution on
    ``qubits`` before the reset, and ``dm_out`` is the partial trace over
    ``qubits`` tensored with |0...0><0...0| on them.
    """
    n = dm_num_qubits(dm)
    qubits = check_qubits(qubits, n)
    k = len(qubits)
    perm, r = _split_perm(qubits, n)
    R, K = 1 << r, 1 << k
    t = np.asarray(dm).reshape((2,) * (2 * n)).transpose(perm).reshape(R, K, R, K)
    probs = np.einsum("akak->k", t).real.copy()
    np.maximum(probs, 0.0, out=probs)
    reduced = np.einsum("akbk->ab", t)
    new = np.zeros((R, K, R, K), dtype=complex)
    new[:, 0, :, 0] = reduced
    out = new.reshape((2,) * (2 * n)).transpose(np.argsort(perm)).reshape(dm.shape)
    return np.ascontiguousarray(out), probs


def partial_trace(dm, keep):
    """Reduced density matrix on ``keep`` (in the listed order)."""
    n = dm_num_qubits(dm)
    keep = check_qubits(keep, n)
    traced = [q for q in range(n) if q not in keep]
    perm = list(keep) + traced + [n + q for q in keep] + [n + q for q in traced]
    K, T = 1 << len(keep), 1 << len(traced)
    t = np.asarray(dm).reshape((2,) * (2 * n)).transpose(perm).reshape(K, T, K, T)
    return np.einsum("atbt->ab", t)
