"""In-place amplitude kernels.

All kernels take ``arr`` of shape ``(L, 2**n)``: ``L`` independent vectors
over ``n`` qubits, qubit 0 being the most significant bit. A density matrix
over ``m`` qubits is handled as a vector over ``2m`` qubits (row qubits
``0..m-1`` followed by column qubits ``m..2m-1``).
"""
from __future__ import annotations

import numpy as np


def _single_view(arr, q, n):
    return arr.reshape(arr.shape[0], 1 << q, 2, 1 << (n - q - 1))


def _pair_view(arr, a, b, n):
    lo, hi = (a, b) if a < b else (b, a)
    v = arr.reshape(arr.shape[0], 1 << lo, 2, 1 << (hi - lo - 1), 2, 1 << (n - hi - 1))
    return v, lo


def _pair_index(a_is_lo, abit, bbit):
    idx = [slice(None)] * 6
    idx[2 if a_is_lo else 4] = abit
    idx[4 if a_is_lo else 2] = bbit
    return tuple(idx)


def apply_single(arr, u, q, n):
    v = _single_view(arr, q, n)
    a0 = v[:, :, 0, :].copy()
    a1 = v[:, :, 1, :]
    v[:, :, 0, :] = u[0, 0] * a0 + u[0, 1] * a1
    v[:, :, 1, :] = u[1, 0] * a0 + u[1, 1] * a1
    return arr


def apply_diagonal_single(arr, d0, d1, q, n):
    v = _single_view(arr, q, n)
    v[:, :, 0, :] *= d0
    v[:, :, 1, :] *= d1
    return arr


def apply_controlled(arr, u, control, target, n):
    """Apply ``u`` to ``target`` on the control=1 subspace only."""
    v, lo = _pair_view(arr, control, target, n)
    c_lo = control == lo
    i0, i1 = _pair_index(c_lo, 1, 0), _pair_index(c_lo, 1, 1)
    if u[0, 1] == 0 and u[1, 0] == 0:
        v[i0] *= u[0, 0]
        v[i1] *= u[1, 1]
        return arr
    a0 = v[i0].copy()
    a1 = v[i1].copy()
    v[i0] = u[0, 0] * a0 + u[0, 1] * a1
    v[i1] = u[1, 0] * a0 + u[1, 1] * a1
    return arr


def apply_two(arr, u, a, b, n):
    """Apply a 4x4 matrix written in the (a, b) basis, ``a`` the high bit."""
    v, lo = _pair_view(arr, a, b, n)
    a_lo = a == lo
    idx = [_pair_index(a_lo, i >> 1, i & 1) for i in range(4)]
    amps = [v[ix].copy() for ix in idx]
    for i, ix in enumerate(idx):
        v[ix] = u[i, 0] * amps[0] + u[i, 1] * amps[1] + u[i, 2] * amps[2] + u[i, 3] * amps[3]
    return arr


def apply_matrix(arr, m, qubits, n):
    """Apply a ``2**k x 2**k`` matrix to ``qubits`` (listed high bit first)."""
    k = len(qubits)
    if k == 1:
        return apply_single(arr, m, qubits[0], n)
    if k == 2:
        return apply_two(arr, m, qubits[0], qubits[1], n)
    L = arr.shape[0]
    t = arr.reshape((L,) + (2,) * n)
    axes = [1 + q for q in qubits]
    moved = np.moveaxis(t, axes, range(n + 1 - k, n + 1))
    shape = moved.shape
    out = (moved.reshape(-1, 1 << k) @ m.T).reshape(shape)
    arr[...] = np.moveaxis(out, range(n + 1 - k, n + 1), axes).reshape(arr.shape)
    return arr
