import numpy as np
import pytest

from conftest import random_dm, random_gate, random_state
from qesn.errors import ConfigError
from qesn.quantum import (
    NoiseParams,
    apply_gate,
    apply_stochastic_pauli,
    dm_apply_gate,
    dm_depolarize,
    dm_from_state,
    dm_measure_reset_channel,
    init_state,
    measure_collapse_reset,
    partial_trace,
    readout_bitflip,
    readout_transition,
)
from qesn.quantum import gates as G
from qesn.quantum.gates import PAULIS


def kraus_depolarize(rho, q, n, p):
    """Oracle: explicit Kraus sum with full-size operators."""
    def embed(op):
        out = np.array([[1.0]])
        for k in range(n):
            out = np.kron(out, op if k == q else np.eye(2))
        return out
    ks = [np.sqrt(1 - p) * np.eye(1 << n)] + [np.sqrt(p / 3) * embed(P) for P in PAULIS]
    return sum(k @ rho @ k.conj().T for k in ks)


def test_dm_from_state():
    assert np.allclose(dm_from_state(np.array([1, 0])), [[1, 0], [0, 0]])
    assert np.allclose(dm_from_state(np.array([0, 1])), [[0, 0], [0, 1]])
    assert np.allclose(dm_from_state(np.array([1, 1]) / np.sqrt(2)), 0.5)


def test_dm_apply_gate_matches_statevector(rng):
    n = 3
    for _ in range(30):
        g = random_gate(rng, n)
        s = random_state(rng, n)
        assert np.allclose(dm_apply_gate(dm_from_state(s), g), dm_from_state(apply_gate(s, g)), atol=1e-9)
    rho = random_dm(rng, 2)
    assert np.allclose(dm_apply_gate(rho, G.rotation(1, 0, 0, 0)), rho, atol=1e-15)
    s = np.zeros(4)
    s[0b10] = 1
    t = np.zeros(4)
    t[0b11] = 1
    assert np.allclose(dm_apply_gate(dm_from_state(s), G.cnot(0, 1)), dm_from_state(t))


def test_measure_reset_channel_examples(rng):
    a, b = random_state(rng, 2), random_state(rng, 1)
    out, probs = dm_measure_reset_channel(dm_from_state(np.kron(a, b)), [2])
    assert np.allclose(partial_trace(out, [0, 1]), dm_from_state(a), atol=1e-12)
    assert np.allclose(probs, np.abs(b) ** 2)

    bell = dm_from_state(np.array([1, 0, 0, 1]) / np.sqrt(2))
    out, probs = dm_measure_reset_channel(bell, [1])
    assert np.allclose(probs, [0.5, 0.5])
    assert np.allclose(out, np.kron(np.eye(2) / 2, [[1, 0], [0, 0]]))


def test_trajectory_average_matches_channel(rng):
    s = random_state(rng, 4)
    batch = np.tile(s, (100_000, 1))
    measure_collapse_reset(batch, [1, 3], rng)
    avg = batch.T @ batch.conj() / batch.shape[0]
    expect, _ = dm_measure_reset_channel(dm_from_state(s), [1, 3])
    assert np.max(np.abs(avg - expect)) < 0.01


def test_depolarize_examples(rng):
    rho = random_dm(rng, 1, rank=2)
    assert np.allclose(dm_depolarize(rho, 0, 0.0), rho)
    assert np.allclose(dm_depolarize(rho, 0, 0.75), np.eye(2) / 2, atol=1e-15)
    for n, q, p in ((1, 0, 0.3), (3, 1, 0.05), (3, 2, 0.9)):
        rho = random_dm(rng, n)
        assert np.max(np.abs(dm_depolarize(rho, q, p) - kraus_depolarize(rho, q, n, p))) < 1e-12


def test_stochastic_pauli(rng):
    s = random_state(rng, 2)
    assert np.array_equal(apply_stochastic_pauli(s, [0, 1], 0.0, rng), s)
    batch = np.tile(init_state(1), (100_000, 1))
    out = apply_stochastic_pauli(batch, [0], 1.0, rng)
    z = np.mean(np.abs(out[:, 0]) ** 2 - np.abs(out[:, 1]) ** 2)
    # X and Y flip |0>, Z does not: <Z> = 1/3 - 2/3
    assert abs(z - (-1 / 3)) < 0.02


def test_stochastic_pauli_ensemble_matches_channel(rng):
    s = random_state(rng, 2)
    batch = np.tile(s, (100_000, 1))
    out = apply_stochastic_pauli(batch, [1], 0.4, rng)
    avg = out.T @ out.conj() / out.shape[0]
    assert np.max(np.abs(avg - dm_depolarize(dm_from_state(s), 1, 0.4))) < 0.01


def test_readout_bitflip(rng):
    bits = rng.integers(0, 2, size=(50, 3)).astype(np.uint8)
    assert np.array_equal(readout_bitflip(bits, 0.0, rng), bits)
    assert np.array_equal(readout_bitflip(bits, 1.0, rng), 1 - bits)
    zeros = np.zeros((100_000, 1), dtype=np.uint8)
    rate = readout_bitflip(zeros, 0.02, rng).mean()
    assert abs(rate - 0.02) < 0.003


def test_readout_transition_matches_sampling(rng):
    probs = np.array([0.5, 0.2, 0.2, 0.1])
    idx = rng.choice(4, size=200_000, p=probs)
    bits = np.stack([idx >> 1, idx & 1], axis=1).astype(np.uint8)
    flipped = readout_bitflip(bits, 0.1, rng)
    freq = np.bincount(flipped[:, 0] * 2 + flipped[:, 1], minlength=4) / len(idx)
    assert np.allclose(readout_transition(probs, 0.1), freq, atol=0.005)


def test_noise_params_validated():
    with pytest.raises(ConfigError):
        NoiseParams(p_depol_1q=-0.1)
    with pytest.raises(ConfigError):
        NoiseParams(p_readout_flip=1.5)
