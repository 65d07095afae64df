"""Classical baselines: a leaky-tanh echo-state network and a windowed linear model."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InitError, ShapeError
from .readout import RidgeElasticConfig, fit_elastic_net
from .reservoir import context_windows
from .seeding import derive_seed


@dataclass(frozen=True)
class EsnParams:
    n_nodes: int = 4
    spectral_radius: float = 0.9
    input_scale: float = 0.5
    density: float = 0.2
    leak_rate: float = 1.0
    seed: int = 0
    bias_scale: float = 1.0

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ConfigError("n_nodes must be positive")
        if self.spectral_radius <= 0:
            raise ConfigError("spectral_radius must be positive")
        if not 0.0 <= self.density <= 1.0:
            raise ConfigError("density must lie in [0, 1]")
        if not 0.0 < self.leak_rate <= 1.0:
            raise ConfigError("leak_rate must lie in (0, 1]")


@dataclass
class EsnState:
    reservoir_weights: np.ndarray  # (n, n)
    input_weights: np.ndarray      # (n, d)
    bias: np.ndarray               # (n,)
    activation: np.ndarray         # (n,)
    leak_rate: float = 1.0


def spectral_radius(w):
    return float(np.max(np.abs(np.linalg.eigvals(w)))) if w.size else 0.0


def rescale_spectral_radius(w, target):
    rho = spectral_radius(w)
    if rho <= 1e-12:
        raise InitError("reservoir matrix has zero spectral radius; reseed")
    return w * (target / rho)


def init_esn(params: EsnParams, input_dim=1, max_reseeds=0):
    """Random leaky-tanh reservoir rescaled to ``params.spectral_radius``.

    A sparse draw can have zero spectral radius; with ``max_reseeds > 0`` the
    draw is retried under derived seeds instead of raising :class:`InitError`.
    """
    for attempt in range(max_reseeds + 1):
        seed = params.seed if attempt == 0 else derive_seed(params.seed, attempt)
        try:
            return _init_esn(params, input_dim, seed)
        except InitError:
            if attempt == max_reseeds:
                raise


def _init_esn(params, input_dim, seed):
    rng = np.random.default_rng(seed)
    n = params.n_nodes
    w = rng.uniform(-1.0, 1.0, size=(n, n))
    w[rng.random((n, n)) >= params.density] = 0.0
    w = rescale_spectral_radius(w, params.spectral_radius)
    w_in = rng.uniform(-1.0, 1.0, size=(n, input_dim)) * params.input_scale
    bias = rng.uniform(-1.0, 1.0, size=n) * params.bias_scale
    return EsnState(w, w_in, bias, np.zeros(n), params.leak_rate)


def esn_run(state: EsnState, series, initial_activation=None):
    """Activation after each input sample, shape ``(N, n_nodes)``.

    a_t = (1 - leak) a_{t-1} + leak * tanh(W a_{t-1} + W_in u_t + b)

    The bias ``b`` breaks the odd symmetry of tanh; without it the features
    cannot follow even functions of the input such as the Lorenz z channel.
    """
    u = np.asarray(series, dtype=float)
    if u.ndim == 1:
        u = u[:, None]
    if u.shape[1] != state.input_weights.shape[1]:
        raise ShapeError(f"input dimension {u.shape[1]} != {state.input_weights.shape[1]}")
    a = state.activation.copy() if initial_activation is None else np.asarray(initial_activation, float).copy()
    drive = u @ state.input_weights.T + state.bias
    leak = state.leak_rate
    W = state.reservoir_weights
    out = np.empty((u.shape[0], a.shape[0]))
    for i in range(u.shape[0]):
        a = (1.0 - leak) * a + leak * np.tanh(W @ a + drive[i])
        out[i] = a
    return out


def linear_baseline(series, targets, washout, context_len=4, l2_weight=0.0):
    """Ridge readout on the raw context window; rows aligned to the window's last sample.

    Returns ``(model, t_index, window_features)``.
    """
    t, windows = context_windows(series, context_len)
    y = np.asarray(targets, dtype=float)
    if y.shape[0] != np.asarray(series).shape[0]:
        raise ShapeError("series and targets must have the same length")
    cfg = RidgeElasticConfig(l1_weight=0.0, l2_weight=l2_weight, washout=washout)
    return fit_elastic_net(windows, y[t], cfg), t, windows
