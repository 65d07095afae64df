"""Counter-based per-shot random streams.

Every shot owns an independent SplitMix64 sequence keyed by
``shot_key(seed, shot_index)``. A batch of shots is simulated together, but
draw ``c`` of shot ``s`` is a pure function of ``(seed, s, c)``, so results do
not depend on how shots are batched or scheduled.
"""
from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = (np.uint64(k) for k in (30, 27, 31, 11))


def mix64(z):
    """SplitMix64 finalizer on uint64 arrays (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def shot_key(seed, shot_index):
    """64-bit key of one shot: mix64(mix64(seed + golden) ^ (index + golden))."""
    s = np.uint64(int(seed) % 2**64)
    i = np.asarray(shot_index, dtype=np.int64).astype(np.uint64)
    with np.errstate(over="ignore"):
        return mix64(mix64(s + _GOLDEN) ^ (i + _GOLDEN))


def derive_seed(seed, *labels):
    """Child seed (non-negative, < 2**63) of ``seed`` for the given integer labels."""
    k = int(seed)
    for lab in labels:
        k = int(shot_key(k, lab)) & (2**63 - 1)
    return k


class ShotStream:
    """Uniform draws for a batch of shots.

    ``random(size)`` requires ``size[0] == len(shots)``; row ``j`` holds the
    next ``prod(size[1:])`` draws of shot ``shots[j]``. Mirrors the
    ``numpy.random.Generator.random`` call shape so the quantum kernels accept
    either.
    """

    def __init__(self, seed, shots):
        self.shots = np.atleast_1d(np.asarray(shots, dtype=np.int64))
        self.keys = shot_key(seed, self.shots)
        self.counter = 0

    def __len__(self):
        return len(self.shots)

    def random(self, size):
        size = (size,) if np.isscalar(size) else tuple(size)
        if not size or size[0] != len(self.shots):
            raise ValueError(f"leading size must be the batch size {len(self.shots)}")
        per_shot = int(np.prod(size[1:], dtype=np.int64))
        steps = np.arange(self.counter + 1, self.counter + 1 + per_shot, dtype=np.uint64)
        self.counter += per_shot
        with np.errstate(over="ignore"):
            state = self.keys[:, None] + steps[None, :] * _GOLDEN
        z = mix64(state)
        u = (z >> _S11).astype(np.float64) * (1.0 / 9007199254740992.0)
        return u.reshape(size)
