"""Quantum echo-state reservoir.

Each timestep encodes a sliding context window into Euler angles, runs
``reupload_blocks`` entangling blocks over (memory, readout) qubit pairs plus
a CRZ chain on the memory register, then measures and resets the readout
register. The memory register is never reinitialized, which gives the
reservoir its fading memory.

Two ways to read features out:

* :func:`run_reservoir` samples shot trajectories and returns empirical
  outcome frequencies (or Pauli-Z means);
* :func:`run_reservoir_exact` evolves the density matrix and returns the
  exact outcome probabilities.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import CapacityError, ConfigError, NormalizationError, ShapeError
from .quantum import gates as G
from .quantum import kernels
from .quantum.density import MAX_DM_QUBITS, dm_apply_gate, dm_measure_reset_channel
from .quantum.noise import (
    NoiseParams,
    bitflip_index_inplace,
    dm_depolarize,
    readout_transition,
    stochastic_pauli_inplace,
)
from .quantum.statevector import (
    MAX_QUBITS,
    apply_gate_inplace,
    bits_from_index,
    init_state,
    measure_reset_indices,
)
from .seeding import ShotStream

DISTRIBUTION = "distribution"
EXPECTATION = "expectation"
FEATURE_MODES = (DISTRIBUTION, EXPECTATION)
# noiseless timesteps on at most this many qubits run as one dense matrix
FUSE_MAX_QUBITS = 8


@dataclass(frozen=True)
class QesnParams:
    n_qubits: int = 8
    context_len: int = 4
    input_dim: int = 1
    reupload_blocks: int = 3
    sparsity: float = 0.5
    shots: int = 60_000
    feature_mode: str = DISTRIBUTION
    seed: int = 0
    noise: Optional[NoiseParams] = None
    exact_mode: bool = False
    input_scale: float = 1.0

    def __post_init__(self):
        if self.n_qubits < 2 or self.n_qubits % 2:
            raise ConfigError(f"n_qubits must be a positive even number, got {self.n_qubits}")
        if self.n_qubits > MAX_QUBITS:
            raise CapacityError(f"at most {MAX_QUBITS} qubits are supported")
        if self.exact_mode and self.n_qubits > MAX_DM_QUBITS:
            raise CapacityError(f"exact mode supports at most {MAX_DM_QUBITS} qubits")
        for name in ("context_len", "input_dim", "reupload_blocks", "shots"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if not 0.0 <= self.sparsity <= 1.0:
            raise ConfigError("sparsity must lie in [0, 1]")
        if self.feature_mode not in FEATURE_MODES:
            raise ConfigError(f"feature_mode must be one of {FEATURE_MODES}")

    @property
    def n_readout(self):
        return self.n_qubits // 2


@dataclass(frozen=True)
class QesnWeights:
    w_in: np.ndarray        # (context_len * input_dim, n_qubits, 3)
    w_bias: np.ndarray      # (n_qubits,)
    w_ent_pair: np.ndarray  # (n_qubits // 2, 2): CRY and CRX angles per pair
    w_ent_mem: np.ndarray   # (n_qubits // 2 - 1,): CRZ angles along the memory chain

    def __post_init__(self):
        for a in (self.w_in, self.w_bias, self.w_ent_pair, self.w_ent_mem):
            a.setflags(write=False)

    @property
    def n_qubits(self):
        return self.w_bias.shape[0]

    def entangling(self):
        return np.concatenate([self.w_ent_pair.ravel(), self.w_ent_mem])


@dataclass
class FeatureMatrix:
    """Feature rows indexed by the timestep of the window's last sample."""

    t: np.ndarray
    values: np.ndarray
    mode: str = DISTRIBUTION
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    @property
    def n_features(self):
        return self.values.shape[1]


def register_layout(n_qubits):
    """Memory register on the high qubits, readout on the low ones."""
    h = n_qubits // 2
    return list(range(h)), list(range(h, n_qubits))


def init_weights(params: QesnParams) -> QesnWeights:
    rng = np.random.default_rng(params.seed)
    n, h = params.n_qubits, params.n_readout
    cd = params.context_len * params.input_dim
    scale = params.input_scale * math.pi / (cd * params.reupload_blocks * n)
    w_in = rng.uniform(-1.0, 1.0, size=(cd, n, 3)) * scale
    w_bias = math.pi - rng.uniform(0.0, math.pi, size=n)  # (0, pi]
    ent = rng.uniform(math.pi / 4, 3 * math.pi / 4, size=2 * h + (h - 1))
    n_zero = math.floor(params.sparsity * ent.size)
    if n_zero:
        ent[rng.choice(ent.size, size=n_zero, replace=False)] = 0.0
    return QesnWeights(w_in, w_bias, ent[: 2 * h].reshape(h, 2).copy(), ent[2 * h:].copy())


def compute_angles(weights: QesnWeights, window):
    """Euler angles per qubit, shape ``(n_qubits, 3)``; a batch of windows gives ``(T, n_qubits, 3)``."""
    window = np.asarray(window, dtype=float)
    cd = weights.w_in.shape[0]
    if window.shape[-1] != cd:
        raise ShapeError(f"window length {window.shape[-1]} != context_len*input_dim = {cd}")
    return np.tensordot(window, weights.w_in, axes=([-1], [0])) + weights.w_bias[:, None]


def context_windows(series, context_len):
    """Timestep index and flattened window (oldest sample first) for every t >= context_len - 1."""
    x = np.asarray(series, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] <= context_len - 1:
        raise ShapeError(f"series of length {x.shape[0]} is shorter than context_len {context_len}")
    win = np.lib.stride_tricks.sliding_window_view(x, context_len, axis=0)  # (T, d, c)
    win = np.ascontiguousarray(win.transpose(0, 2, 1)).reshape(win.shape[0], -1)
    return np.arange(context_len - 1, x.shape[0]), win


# -- circuit description -------------------------------------------------------

def timestep_gates(weights: QesnWeights, angles, reupload_blocks, layout=None):
    """Logical gate list of one timestep, excluding the final measure-and-reset.

    Entangling gates whose weight is zero are omitted.
    """
    memory, readout = layout or register_layout(weights.n_qubits)
    out = []
    for _ in range(reupload_blocks):
        for k, (m, r) in enumerate(zip(memory, readout)):
            rot = [G.rotation(m, *angles[m]), G.rotation(r, *angles[r])]
            eps1, eps2 = weights.w_ent_pair[k]
            out += rot
            out.append(G.cnot(m, r))
            out += rot
            if eps1 != 0.0:
                out.append(G.cry(m, r, eps1))
            out += rot
            if eps2 != 0.0:
                out.append(G.crx(m, r, eps2))
        for k, eps3 in enumerate(weights.w_ent_mem):
            if eps3 != 0.0:
                out.append(G.crz(memory[k], memory[k + 1], eps3))
    return out


def logical_depth(gate_list, n_qubits, measured=None):
    """ASAP gate-layer depth; a measured register adds one final layer."""
    free = [0] * n_qubits
    for g in gate_list:
        layer = max(free[q] for q in g.qubits)
        for q in g.qubits:
            free[q] = layer + 1
    if measured:
        layer = max(free[q] for q in measured)
        for q in measured:
            free[q] = layer + 1
    return max(free)


def gate_counts(gate_list):
    counts = {}
    for g in gate_list:
        counts[g.kind] = counts.get(g.kind, 0) + 1
    return counts


def circuit_stats(weights: QesnWeights, params: QesnParams, series=None):
    """Per-timestep gate counts and logical depth (angles do not change the structure)."""
    angles = np.ones((weights.n_qubits, 3))
    gl = timestep_gates(weights, angles, params.reupload_blocks)
    _, readout = register_layout(weights.n_qubits)
    stats = {
        "gates_per_timestep": len(gl),
        "gate_counts_per_timestep": gate_counts(gl),
        "logical_depth_per_timestep": logical_depth(gl, weights.n_qubits, readout),
    }
    if series is not None:
        T = len(series) - params.context_len + 1
        stats["timesteps"] = T
        stats["total_gates"] = T * len(gl)
        stats["total_logical_depth"] = T * stats["logical_depth_per_timestep"]
    return stats


def _pair_unitary(rm, rr, eps1, eps2):
    """Fused 4x4 unitary of one pair section, (memory, readout) basis."""
    rot = np.kron(rm, rr)
    u = G.cnot(0, 1).matrix() @ rot
    u = rot @ u
    if eps1 != 0.0:
        u = G.cry(0, 1, eps1).matrix() @ u
    u = rot @ u
    if eps2 != 0.0:
        u = G.crx(0, 1, eps2).matrix() @ u
    return u


@lru_cache(maxsize=64)
def _depol_superop(p, which):
    """Superoperator on two qubits (row-major vec) depolarizing qubit ``which`` (0 high, 1 low)."""
    s = (1.0 - p) * np.eye(16, dtype=complex)
    for P in G.PAULIS:
        full = np.kron(P, G.I2) if which == 0 else np.kron(G.I2, P)
        s += (p / 3.0) * np.kron(full, full.conj())
    s.setflags(write=False)
    return s


def _unitary_superop(u):
    return np.kron(u, u.conj())


def _pair_superop(rm, rr, eps1, eps2, noise: NoiseParams):
    """Fused noisy channel of one pair section: each gate followed by its depolarization."""
    d1 = [_depol_superop(noise.p_depol_1q, 0), _depol_superop(noise.p_depol_1q, 1)]
    d2 = _depol_superop(noise.p_depol_2q, 0) @ _depol_superop(noise.p_depol_2q, 1)
    rot = d1[1] @ _unitary_superop(np.kron(G.I2, rr)) @ d1[0] @ _unitary_superop(np.kron(rm, G.I2))
    s = d2 @ _unitary_superop(G.cnot(0, 1).matrix()) @ rot
    s = rot @ s
    if eps1 != 0.0:
        s = d2 @ _unitary_superop(G.cry(0, 1, eps1).matrix()) @ s
    s = rot @ s
    if eps2 != 0.0:
        s = d2 @ _unitary_superop(G.crx(0, 1, eps2).matrix()) @ s
    return s


# -- trajectories --------------------------------------------------------------

def _timestep_batch(arr, weights, angles, params, stream, layout=None):
    """Advance a ``(L, 2**n)`` batch by one timestep; returns outcome indices."""
    n = weights.n_qubits
    memory, readout = layout or register_layout(n)
    noise = params.noise
    L = arr.shape[0]
    if noise is None:
        pair_u = [
            _pair_unitary(G.rotation_matrix(*angles[m]), G.rotation_matrix(*angles[r]), *weights.w_ent_pair[k])
            for k, (m, r) in enumerate(zip(memory, readout))
        ]
        crz = [(k, G.rz(e)) for k, e in enumerate(weights.w_ent_mem) if e != 0.0]

        def step(a):
            for _ in range(params.reupload_blocks):
                for u, m, r in zip(pair_u, memory, readout):
                    kernels.apply_two(a, u, m, r, n)
                for k, u in crz:
                    kernels.apply_controlled(a, u, memory[k], memory[k + 1], n)
            return a

        if n <= FUSE_MAX_QUBITS:
            # rows of step(I) are U e_i, i.e. U^T; one matmul beats many small kernels
            arr[...] = arr @ step(np.eye(1 << n, dtype=complex))
        else:
            step(arr)
    else:
        for g in timestep_gates(weights, angles, params.reupload_blocks, layout):
            apply_gate_inplace(arr, g, n)
            p = noise.p_depol_2q if g.is_two_qubit else noise.p_depol_1q
            for q in g.qubits:
                stochastic_pauli_inplace(arr, q, n, p, stream.random((L,)))
    outcome = measure_reset_indices(arr, readout, n, stream.random((L,)))
    if noise is not None:
        bitflip_index_inplace(outcome, len(readout), noise.p_readout_flip, stream.random((L, len(readout))))
    return outcome


def apply_timestep(state, weights: QesnWeights, window, params: QesnParams, rng, layout=None):
    """One reservoir timestep on ``state`` (modified in place). Returns the readout bits."""
    if state.shape[-1] != 1 << weights.n_qubits or not state.flags.c_contiguous:
        raise ShapeError("state does not match the reservoir size or is not contiguous")
    arr = state.reshape(-1, state.shape[-1])
    outcome = _timestep_batch(arr, weights, compute_angles(weights, window), params, rng, layout)
    bits = bits_from_index(outcome, weights.n_qubits // 2)
    return bits[0] if state.ndim == 1 else bits


def _run_batch(angles, weights, params, seed, shots):
    """Run a batch of shots; returns outcome indices of shape ``(T, len(shots))``."""
    stream = ShotStream(seed, shots)
    arr = init_state(weights.n_qubits, batch=len(shots))
    out = np.empty((angles.shape[0], len(shots)), dtype=np.int64)
    for i, a in enumerate(angles):
        out[i] = _timestep_batch(arr, weights, a, params, stream)
    return out


def run_trajectory(series, weights: QesnWeights, params: QesnParams, rng=None, shot=0):
    """Outcome bits ``(T, n_qubits/2)`` of one shot, one row per window.

    ``rng`` defaults to the shot's own stream derived from ``params.seed``.
    """
    _, windows = context_windows(series, params.context_len)
    angles = compute_angles(weights, windows)
    stream = rng if rng is not None else ShotStream(params.seed, [shot])
    state = init_state(weights.n_qubits, batch=1)
    rows = [_timestep_batch(state, weights, a, params, stream)[0] for a in angles]
    return bits_from_index(np.array(rows), weights.n_qubits // 2)


def sample_counts(series, weights: QesnWeights, params: QesnParams, batch_size=4096, workers=1):
    """Outcome counts ``(T, 2**(n_qubits/2))`` over ``params.shots`` trajectories.

    Shots are split into fixed batches; every shot draws from its own stream,
    so the counts do not depend on ``batch_size`` or ``workers``.
    """
    t, windows = context_windows(series, params.context_len)
    angles = compute_angles(weights, windows)
    n = weights.n_qubits
    batch_size = max(1, min(batch_size, (1 << 22) >> n))
    batches = [np.arange(s, min(s + batch_size, params.shots)) for s in range(0, params.shots, batch_size)]
    K = 1 << (n // 2)
    counts = np.zeros((len(t), K), dtype=np.int64)

    def job(shots):
        out = _run_batch(angles, weights, params, params.seed, shots)
        c = np.zeros((len(t), K), dtype=np.int64)
        np.add.at(c, (np.repeat(np.arange(len(t)), out.shape[1]), out.ravel()), 1)
        return c

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            for c in ex.map(job, batches):
                counts += c
    else:
        for b in batches:
            counts += job(b)
    return t, counts


def _signs(k):
    return 1.0 - 2.0 * bits_from_index(np.arange(1 << k), k).astype(float)


def expectation_features(dist):
    """Pauli-Z mean per readout qubit from outcome probabilities."""
    dist = np.asarray(dist, dtype=float)
    k = dist.shape[-1].bit_length() - 1
    if 1 << k != dist.shape[-1]:
        raise ShapeError("distribution length is not a power of two")
    if np.any(np.abs(dist.sum(axis=-1) - 1.0) > 1e-6):
        raise NormalizationError("distribution rows must sum to 1")
    return dist @ _signs(k)


def _features_from_probs(t, probs, mode, meta):
    values = probs if mode == DISTRIBUTION else expectation_features(probs)
    return FeatureMatrix(t, values, mode, meta)


def run_reservoir(series, weights: QesnWeights, params: QesnParams, batch_size=4096, workers=1):
    t, counts = sample_counts(series, weights, params, batch_size, workers)
    meta = {"shots": params.shots, "exact": False}
    if params.feature_mode == DISTRIBUTION:
        return FeatureMatrix(t, counts / params.shots, DISTRIBUTION, meta)
    # integer sums first: identical to the per-shot mean of (1 - 2 bit)
    ev = (counts @ _signs(weights.n_qubits // 2).astype(np.int64)) / params.shots
    return FeatureMatrix(t, ev, EXPECTATION, meta)


# -- exact mode ----------------------------------------------------------------

def _memory_dm(initial_memory, h):
    if initial_memory is None:
        rho = np.zeros((1 << h, 1 << h), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    m = np.asarray(initial_memory, dtype=complex)
    if m.ndim == 1:
        m = np.outer(m, m.conj())
    if m.shape != (1 << h, 1 << h):
        raise ShapeError(f"initial memory state must act on {h} qubits")
    return m


def _exact_kraus_run(angles, weights, params, rho_m):
    n, h = weights.n_qubits, weights.n_qubits // 2
    M = 1 << h
    memory, readout = register_layout(n)
    probs = np.empty((angles.shape[0], M))
    basis = np.zeros((M, 1 << n), dtype=complex)
    basis[np.arange(M), np.arange(M) << h] = 1.0
    crz = [(k, G.rz(e)) for k, e in enumerate(weights.w_ent_mem) if e != 0.0]
    for i, a in enumerate(angles):
        arr = basis.copy()
        pair_u = [
            _pair_unitary(G.rotation_matrix(*a[m]), G.rotation_matrix(*a[r]), *weights.w_ent_pair[k])
            for k, (m, r) in enumerate(zip(memory, readout))
        ]
        for _ in range(params.reupload_blocks):
            for u, m, r in zip(pair_u, memory, readout):
                kernels.apply_two(arr, u, m, r, n)
            for k, u in crz:
                kernels.apply_controlled(arr, u, memory[k], memory[k + 1], n)
        # Kraus operator of outcome b: K[b][m', m] = <m', b| V |m, 0>
        K = arr.reshape(M, M, M).transpose(2, 1, 0)
        KR = K @ rho_m
        out = KR @ K.conj().transpose(0, 2, 1)
        probs[i] = np.maximum(np.einsum("bii->b", out).real, 0.0)
        rho_m = out.sum(axis=0)
    return probs, rho_m


def _crz_phase_superop(theta):
    """Elementwise factor of CRZ(m_k -> m_k+1) on two pair axes, shape (16, 16)."""
    ph = np.ones((2, 2), dtype=complex)
    ph[1] = [np.exp(-0.5j * theta), np.exp(0.5j * theta)]
    # pair axis index = (m, r, m', r'); only the memory bits matter
    m = (np.arange(16) >> 3) & 1
    mc = (np.arange(16) >> 1) & 1
    return ph[m[:, None], m[None, :]] * ph[mc[:, None], mc[None, :]].conj()


def _depolarize_memory(v, lam):
    """In place on a ``(A, m, r, m', r', B)`` view: rho -> lam rho + (1 - lam) Tr_m(rho) (x) I/2."""
    if lam == 1.0:
        return
    tr = v[:, 0, :, 0] + v[:, 1, :, 1]
    v *= lam
    c = 0.5 * (1.0 - lam)
    v[:, 0, :, 0] += c * tr
    v[:, 1, :, 1] += c * tr


def _exact_noisy_run(angles, weights, params, rho_m):
    """Noisy density-matrix evolution in a pair-grouped layout.

    The 2n-qubit tensor is stored with one 16-dim axis per pair,
    ``(m_k, r_k, m_k', r_k')``, so every pair channel is a plain batched
    matmul along one axis.
    """
    h = weights.n_qubits // 2
    M = 1 << h
    noise = params.noise
    lam = 1.0 - 4.0 * noise.p_depol_2q / 3.0
    crz = [(k, _crz_phase_superop(e)) for k, e in enumerate(weights.w_ent_mem) if e != 0.0]
    probs = np.empty((angles.shape[0], M))
    # sublist axis labels: m_k = k, r_k = h + k, m_k' = 2h + k, r_k' = 3h + k
    embed = [lab for k in range(h) for lab in (k, 2 * h + k)]
    diag = [lab for k in range(h) for lab in (k, h + k, k, h + k)]
    traced = [lab for k in range(h) for lab in (k, h + k, 2 * h + k, h + k)]
    zero = tuple(i for k in range(h) for i in (slice(None), 0, slice(None), 0))
    t = np.zeros((2,) * (4 * h), dtype=complex)
    rm = rho_m.reshape((2,) * (2 * h))
    t[zero] = np.einsum(rm, list(range(h)) + list(range(2 * h, 3 * h)), embed)
    for i, a in enumerate(angles):
        pair_s = [
            _pair_superop(G.rotation_matrix(*a[k]), G.rotation_matrix(*a[h + k]), *weights.w_ent_pair[k], noise)
            for k in range(h)
        ]
        for _ in range(params.reupload_blocks):
            for k, sop in enumerate(pair_s):
                v = t.reshape(16 ** k, 16, -1)
                t = np.matmul(sop, v)
            for k, f in crz:
                t.reshape(16 ** k, 16, 16, -1)[...] *= f[None, :, :, None]
                for j in (k, k + 1):
                    _depolarize_memory(t.reshape(16 ** j, 2, 2, 2, 2, -1), lam)
        t = t.reshape((2,) * (4 * h))
        # readout marginal: trace the memory (m' = m), diagonal of the readout (r' = r)
        probs[i] = np.maximum(np.einsum(t, diag, list(range(h, 2 * h))).real.reshape(M), 0.0)
        # reset: trace out the readout and put |0><0| back
        reduced = np.einsum(t, traced, embed)
        t = np.zeros_like(t)
        t[zero] = reduced
    t = t.reshape((2,) * (4 * h))
    rho_m = np.einsum(t[zero], embed, list(range(h)) + list(range(2 * h, 3 * h))).reshape(M, M)
    return probs, rho_m


def _exact_reference_run(angles, weights, params, rho_m, layout=None):
    """Literal gate-by-gate density-matrix evolution (slow; used as an oracle)."""
    n = weights.n_qubits
    memory, readout = layout or register_layout(n)
    noise = params.noise
    # place the memory state on the memory qubits and |0> on the readout ones
    M = rho_m.shape[0]
    perm = list(memory) + list(readout) + [n + q for q in memory] + [n + q for q in readout]
    block = np.zeros((M, M, M, M), dtype=complex)
    block[:, 0, :, 0] = rho_m
    full = block.reshape((2,) * (2 * n)).transpose(np.argsort(perm)).reshape(1 << n, 1 << n)
    dm = np.ascontiguousarray(full)
    probs = np.empty((angles.shape[0], 1 << len(readout)))
    for i, a in enumerate(angles):
        for g in timestep_gates(weights, a, params.reupload_blocks, layout):
            dm = dm_apply_gate(dm, g)
            if noise is not None:
                p = noise.p_depol_2q if g.is_two_qubit else noise.p_depol_1q
                for q in g.qubits:
                    dm = dm_depolarize(dm, q, p)
        dm, probs[i] = dm_measure_reset_channel(dm, readout)
    return probs, dm


def exact_probabilities(series, weights: QesnWeights, params: QesnParams, initial_memory=None,
                        method="fast", layout=None):
    """Exact readout distribution per window, shape ``(T, 2**(n_qubits/2))``.

    ``initial_memory`` optionally sets the starting memory-register state
    (statevector or density matrix over n_qubits/2 qubits).
    """
    n = weights.n_qubits
    if n > MAX_DM_QUBITS:
        raise CapacityError(f"exact mode supports at most {MAX_DM_QUBITS} qubits, got {n}")
    t, windows = context_windows(series, params.context_len)
    angles = compute_angles(weights, windows)
    rho_m = _memory_dm(initial_memory, n // 2)
    if method == "reference" or layout is not None:
        probs, _ = _exact_reference_run(angles, weights, params, rho_m, layout)
    elif params.noise is None:
        probs, _ = _exact_kraus_run(angles, weights, params, rho_m)
    else:
        probs, _ = _exact_noisy_run(angles, weights, params, rho_m)
    if params.noise is not None and params.noise.p_readout_flip > 0.0:
        probs = readout_transition(probs, params.noise.p_readout_flip)
    return t, probs


def run_reservoir_exact(series, weights: QesnWeights, params: QesnParams, initial_memory=None,
                        method="fast"):
    t, probs = exact_probabilities(series, weights, params, initial_memory, method)
    return _features_from_probs(t, probs, params.feature_mode, {"shots": None, "exact": True})


def run_qesn(series, weights: QesnWeights, params: QesnParams, **kw):
    """Dispatch on ``params.exact_mode``."""
    if params.exact_mode:
        return run_reservoir_exact(series, weights, params)
    return run_reservoir(series, weights, params, **kw)
