"""Statevector trajectories with mid-circuit measure-and-reset.

A state is a complex array of length ``2**n``; a batch of independent shot
trajectories is an array of shape ``(shots, 2**n)``. Every function accepts
either form.
"""
from __future__ import annotations

import numpy as np

from ..errors import CapacityError, NumericalDegeneracyError, OperandError, ShapeError
from . import kernels
from .gates import ROTATION, Gate

MAX_QUBITS = 24


def init_state(n_qubits, batch=None):
    """|0...0> on ``n_qubits``; ``batch`` stacks that many copies."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise CapacityError(f"statevector supports 1..{MAX_QUBITS} qubits, got {n_qubits}")
    shape = (1 << n_qubits,) if batch is None else (batch, 1 << n_qubits)
    psi = np.zeros(shape, dtype=complex)
    psi[..., 0] = 1.0
    return psi


def num_qubits(arr):
    dim = arr.shape[-1]
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise ShapeError(f"dimension {dim} is not a power of two")
    return n


def check_qubits(qubits, n):
    qubits = [int(q) for q in qubits]
    if len(set(qubits)) != len(qubits):
        raise OperandError(f"duplicate qubit indices in {qubits}")
    for q in qubits:
        if not 0 <= q < n:
            raise OperandError(f"qubit {q} out of range for {n} qubits")
    return qubits


def _as_batch(state):
    arr = np.ascontiguousarray(state, dtype=complex)
    return arr.reshape(-1, arr.shape[-1])


def apply_gate_inplace(arr, gate, n):
    """Kernel entry for a ``(L, 2**n)`` contiguous array; no validation."""
    if gate.kind == ROTATION:
        kernels.apply_single(arr, gate.target_matrix(), gate.qubits[0], n)
    else:
        kernels.apply_controlled(arr, gate.target_matrix(), gate.qubits[0], gate.qubits[1], n)
    return arr


def apply_gate(state, gate: Gate):
    """Return a new state with ``gate`` applied."""
    n = num_qubits(state)
    check_qubits(gate.qubits, n)
    out = np.array(state, dtype=complex, copy=True, order="C")
    apply_gate_inplace(out.reshape(-1, out.shape[-1]), gate, n)
    return out


def marginal_probs(state, qubits):
    """Probability of each outcome on ``qubits``; outcome bits read qubits[0] first."""
    n = num_qubits(state)
    qubits = check_qubits(qubits, n)
    arr = _as_batch(state)
    k = len(qubits)
    p = (arr.real**2 + arr.imag**2).reshape((arr.shape[0],) + (2,) * n)
    rest = tuple(1 + q for q in range(n) if q not in qubits)
    p = p.sum(axis=rest)
    # remaining axes are in ascending qubit order; reorder to the requested order
    order = np.argsort(np.argsort(qubits))
    p = np.transpose(p, (0,) + tuple(1 + int(i) for i in order)).reshape(-1, 1 << k)
    return p[0] if state.ndim == 1 else p


def bits_from_index(index, k):
    """Outcome index -> bits array, most significant (first measured qubit) first."""
    index = np.asarray(index)
    shifts = np.arange(k - 1, -1, -1)
    return ((index[..., None] >> shifts) & 1).astype(np.uint8)


def index_from_bits(bits):
    bits = np.asarray(bits, dtype=np.int64)
    k = bits.shape[-1]
    return (bits << np.arange(k - 1, -1, -1)).sum(axis=-1)


def measure_reset_indices(arr, qubits, n, u):
    """Collapse-and-reset kernel on a contiguous ``(L, 2**n)`` array.

    ``u`` holds one uniform per row. Returns the sampled outcome indices.
    """
    L = arr.shape[0]
    k = len(qubits)
    t = arr.reshape((L,) + (2,) * n)
    axes = [1 + q for q in qubits]
    moved = np.moveaxis(t, axes, range(n + 1 - k, n + 1))
    flat = moved.reshape(L, -1, 1 << k)
    probs = (flat.real**2 + flat.imag**2).sum(axis=1)
    cdf = np.cumsum(probs, axis=1)
    total = cdf[:, -1]
    if np.any(total < 1e-12):
        raise NumericalDegeneracyError("state norm underflow before measurement")
    outcome = np.minimum((cdf < (u * total)[:, None]).sum(axis=1), (1 << k) - 1)
    rows = np.arange(L)
    p_sel = probs[rows, outcome]
    # an outcome of probability zero can only be hit through cdf ties; move to a supported one
    bad = p_sel <= 0.0
    if np.any(bad):
        outcome[bad] = np.argmax(probs[bad], axis=1)
        p_sel = probs[rows, outcome]
    if np.any(p_sel < 1e-12):
        raise NumericalDegeneracyError("selected outcome has vanishing probability")
    kept = flat[rows, :, outcome] / np.sqrt(p_sel)[:, None]
    new = np.zeros_like(flat)
    new[:, :, 0] = kept
    moved[...] = new.reshape(moved.shape)
    return outcome


def measure_collapse_reset(state, qubits, rng):
    """Measure ``qubits``, collapse, and reset them to |0>. Modifies ``state`` in place.

    Returns the outcome bits (``(k,)`` for one state, ``(L, k)`` for a batch).
    ``rng`` is a ``numpy.random.Generator`` or a :class:`qesn.seeding.ShotStream`.
    """
    n = num_qubits(state)
    qubits = check_qubits(qubits, n)
    if not state.flags.c_contiguous:
        raise ShapeError("measure_collapse_reset needs a C-contiguous state")
    arr = state.reshape(-1, state.shape[-1])
    u = rng.random((arr.shape[0],))
    outcome = measure_reset_indices(arr, qubits, n, u)
    bits = bits_from_index(outcome, len(qubits))
    return bits[0] if state.ndim == 1 else bits
