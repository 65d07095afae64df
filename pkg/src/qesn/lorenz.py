"""Lorenz-63 trajectories and the normalized train/test dataset."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError, DataError, IntegrationError


@dataclass(frozen=True)
class LorenzParams:
    sigma: float = 10.0
    rho: float = 28.0
    beta: float = 8.0 / 3.0
    dt: float = 0.02
    n_steps: int = 10_400
    initial: tuple = (1.0, 1.0, 1.0)
    transient_skip: int = 500

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.n_steps <= self.transient_skip:
            raise ConfigError("n_steps must exceed transient_skip")
        object.__setattr__(self, "initial", tuple(float(v) for v in self.initial))

    def to_dict(self):
        return asdict(self)


def lorenz_derivative(point, params: LorenzParams):
    x, y, z = point[..., 0], point[..., 1], point[..., 2]
    return np.stack(
        [params.sigma * (y - x), x * (params.rho - z) - y, x * y - params.beta * z], axis=-1
    )


def rk4_integrate(params: LorenzParams):
    """Fixed-step classical RK4.

    Row ``i`` is the state after ``i`` steps from ``params.initial``, for
    ``i = transient_skip .. n_steps - 1``.
    """
    dt = params.dt
    out = np.empty((params.n_steps, 3))
    s = np.asarray(params.initial, dtype=float)
    f = lorenz_derivative
    for i in range(params.n_steps):
        out[i] = s
        k1 = f(s, params)
        k2 = f(s + 0.5 * dt * k1, params)
        k3 = f(s + 0.5 * dt * k2, params)
        k4 = f(s + dt * k3, params)
        s = s + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(s)):
            raise IntegrationError(f"trajectory blew up at step {i + 1}")
    return out[params.transient_skip:]


@dataclass
class LorenzDataset:
    samples: np.ndarray   # (N, 3) normalized x, y, z
    mean: np.ndarray
    scale: np.ndarray
    split_index: int
    params: LorenzParams = field(default_factory=LorenzParams)

    def __len__(self):
        return self.samples.shape[0]

    @property
    def inputs(self):
        """The driving signal: normalized x(t)."""
        return self.samples[:, 0]

    @property
    def targets(self):
        """Cross-prediction targets: normalized (y, z)."""
        return self.samples[:, 1:]

    def normalize(self, raw):
        return (np.asarray(raw) - self.mean) / self.scale

    def denormalize(self, normed):
        return np.asarray(normed) * self.scale + self.mean


def normalize_split(raw, split):
    """z-score every channel with statistics of ``raw[:split]`` only."""
    train = raw[:split]
    mean = train.mean(axis=0)
    scale = train.std(axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    return (raw - mean) / scale, mean, scale


def make_dataset(params: LorenzParams = None, n_points=9900, split=6900):
    params = params or LorenzParams(n_steps=500 + n_points)
    if not 0 < split < n_points:
        raise ConfigError("split must fall strictly inside the dataset")
    raw = rk4_integrate(params)
    if raw.shape[0] < n_points:
        raise DataError(f"integration produced {raw.shape[0]} samples, {n_points} requested")
    raw = raw[:n_points]
    samples, mean, scale = normalize_split(raw, split)
    return LorenzDataset(samples, mean, scale, split, params)
