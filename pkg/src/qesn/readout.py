"""Linear readout: elastic net by cyclic coordinate descent, prediction, RMSE."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ConvergenceError, DataError, ShapeError


@dataclass(frozen=True)
class RidgeElasticConfig:
    l1_weight: float = 0.0
    l2_weight: float = 0.0
    washout: int = 300
    max_iter: int = 10_000
    tol: float = 1e-10
    fit_intercept: bool = True

    def __post_init__(self):
        if self.l1_weight < 0 or self.l2_weight < 0:
            raise ConfigError("penalty weights must be nonnegative")
        if self.washout < 0:
            raise ConfigError("washout must be nonnegative")
        if self.max_iter < 1 or self.tol <= 0:
            raise ConfigError("max_iter must be positive and tol > 0")


@dataclass
class ReadoutModel:
    """Coefficients live in standardized-feature space."""

    coefficients: np.ndarray  # (n_features, n_targets)
    intercept: np.ndarray     # (n_targets,)
    config: RidgeElasticConfig
    feature_mean: np.ndarray
    feature_scale: np.ndarray
    n_iter: int = 0
    objective_history: list = field(default_factory=list)

    @property
    def n_features(self):
        return self.coefficients.shape[0]

    def raw_coefficients(self):
        """Coefficients and intercept for unstandardized features."""
        w = self.coefficients / self.feature_scale[:, None]
        return w, self.intercept - self.feature_mean @ w


def soft_threshold(x, t):
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def _as_2d(a):
    a = np.asarray(a, dtype=float)
    return a[:, None] if a.ndim == 1 else a


def _objective(w, G, c, yy, l1, l2):
    # per-column (1/2m)|y - Xw|^2 + l1|w|_1 + (l2/2)|w|^2, summed over targets
    quad = 0.5 * (yy - 2.0 * np.einsum("ft,ft->t", w, c) + np.einsum("ft,fg,gt->t", w, G, w))
    return float(np.sum(quad + l1 * np.abs(w).sum(axis=0) + 0.5 * l2 * (w**2).sum(axis=0)))


def fit_elastic_net(features, targets, config: RidgeElasticConfig = RidgeElasticConfig(), init=None):
    """Minimize (1/2m)|Y - XW|^2 + l1|W|_1 + (l2/2)|W|^2 after dropping the washout rows.

    Features are standardized first. Target columns share the Gram matrix and
    are updated together; their problems stay independent. ``init`` warm-starts
    the standardized coefficients.
    """
    X = _as_2d(features)
    Y = _as_2d(targets)
    if X.shape[0] != Y.shape[0]:
        raise ShapeError(f"{X.shape[0]} feature rows vs {Y.shape[0]} target rows")
    if config.washout >= X.shape[0]:
        raise ConfigError(f"washout {config.washout} leaves no training rows")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
        raise DataError("non-finite values in regression inputs")
    X = X[config.washout:]
    Y = Y[config.washout:]
    m, p = X.shape

    if config.fit_intercept:
        mean = X.mean(axis=0)
        y_mean = Y.mean(axis=0)
    else:
        mean = np.zeros(p)
        y_mean = np.zeros(Y.shape[1])
    Xc = X - mean
    scale = np.sqrt((Xc**2).mean(axis=0))
    scale = np.where(scale > 1e-12, scale, 1.0)
    Xs = Xc / scale
    Yc = Y - y_mean

    G = Xs.T @ Xs / m
    c = Xs.T @ Yc / m
    yy = np.einsum("it,it->t", Yc, Yc) / m
    l1, l2 = config.l1_weight, config.l2_weight
    denom = np.diag(G) + l2

    w = np.zeros((p, Y.shape[1])) if init is None else np.array(init, dtype=float).reshape(p, Y.shape[1])
    Gw = G @ w
    history = [_objective(w, G, c, yy, l1, l2)]
    n_iter = 0
    for n_iter in range(1, config.max_iter + 1):
        max_delta = 0.0
        for j in range(p):
            if denom[j] <= 0.0:
                continue
            wj = w[j]
            rho = c[j] - Gw[j] + G[j, j] * wj
            new = soft_threshold(rho, l1) / denom[j]
            delta = new - wj
            if np.any(delta != 0.0):
                Gw += np.outer(G[:, j], delta)
                w[j] = new
                max_delta = max(max_delta, float(np.max(np.abs(delta))))
        f = _objective(w, G, c, yy, l1, l2)
        if f > history[-1] + 1e-10 * (1.0 + abs(history[-1])):
            raise ConvergenceError(f"objective increased in sweep {n_iter}: {history[-1]} -> {f}")
        history.append(f)
        if max_delta < config.tol:
            break
    return ReadoutModel(w, y_mean.copy(), config, mean, scale, n_iter, history)


def predict(model: ReadoutModel, features):
    X = _as_2d(features)
    if X.shape[1] != model.n_features:
        raise ShapeError(f"model expects {model.n_features} features, got {X.shape[1]}")
    return (X - model.feature_mean) / model.feature_scale @ model.coefficients + model.intercept


def rmse(predictions, targets, skip=0):
    """Per-target root mean squared error over rows ``skip:``."""
    P, Y = _as_2d(predictions), _as_2d(targets)
    if P.shape != Y.shape:
        raise ShapeError(f"prediction shape {P.shape} != target shape {Y.shape}")
    if skip >= P.shape[0]:
        raise DataError("no rows left after skip")
    return np.sqrt(np.mean((P[skip:] - Y[skip:]) ** 2, axis=0))
