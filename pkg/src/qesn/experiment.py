"""Experiment plumbing shared by the CLI, the demos and the acceptance tests.

Every model is driven over the whole series (train and test back to back),
its feature rows are split at ``dataset.split_index``, and a readout is fit
over a small penalty grid.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import time
from dataclasses import asdict, dataclass, field, is_dataclass, replace

import numpy as np

from .errors import ConfigError, ShapeError
from .esn import EsnParams, esn_run, init_esn
from .lorenz import LorenzDataset
from .readout import ReadoutModel, RidgeElasticConfig, fit_elastic_net, predict, rmse
from .reservoir import (
    DISTRIBUTION,
    EXPECTATION,
    FeatureMatrix,
    QesnParams,
    circuit_stats,
    context_windows,
    expectation_features,
    init_weights,
    run_qesn,
)

PAPER_PROTOCOL = "test"
VALIDATION = "validation"


def _plain(obj):
    if is_dataclass(obj):
        return {k: _plain(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def config_hash(obj):
    """Short SHA-256 of the canonical JSON form; independent of key order."""
    blob = json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class RegressionSpec:
    washout: int = 300
    l1_grid: tuple = (0.0, 1e-5, 1e-4, 1e-3, 1e-2)
    l2_grid: tuple = (0.0, 1e-4, 1e-2, 1e-1)
    max_iter: int = 3000
    tol: float = 1e-8
    selection: str = PAPER_PROTOCOL
    validation_fraction: float = 0.2

    def __post_init__(self):
        if self.selection not in (PAPER_PROTOCOL, VALIDATION):
            raise ConfigError(f"selection must be '{PAPER_PROTOCOL}' or '{VALIDATION}'")
        if not self.l1_grid or not self.l2_grid:
            raise ConfigError("penalty grids must be non-empty")
        object.__setattr__(self, "l1_grid", tuple(float(v) for v in self.l1_grid))
        object.__setattr__(self, "l2_grid", tuple(float(v) for v in self.l2_grid))

    def config(self, l1, l2, washout=None):
        return RidgeElasticConfig(l1, l2, self.washout if washout is None else washout,
                                  self.max_iter, self.tol)


@dataclass
class FitResult:
    train_rmse: np.ndarray
    test_rmse: np.ndarray
    l1: float
    l2: float
    model: ReadoutModel
    t: np.ndarray
    predictions: np.ndarray
    targets: np.ndarray
    selection: str = PAPER_PROTOCOL

    @property
    def train(self):
        return float(np.mean(self.train_rmse))

    @property
    def test(self):
        return float(np.mean(self.test_rmse))

    def summary(self):
        return {
            "train_rmse": self.train, "test_rmse": self.test,
            "train_rmse_per_target": self.train_rmse.tolist(),
            "test_rmse_per_target": self.test_rmse.tolist(),
            "l1": self.l1, "l2": self.l2, "selection": self.selection,
        }


def fit_readout(t, values, targets, split_index, spec: RegressionSpec = RegressionSpec()):
    """Fit a readout for every penalty pair and keep the best one.

    ``targets`` is indexed by absolute timestep. With ``selection='test'``
    the pair minimizing test RMSE wins, which looks at the test set; with
    ``'validation'`` the tail of the training rows picks the pair and the
    model is refit on all training rows.
    """
    t = np.asarray(t)
    values = np.asarray(values, dtype=float)
    if values.shape[0] != t.shape[0]:
        raise ShapeError("feature rows and timestep index disagree")
    y = np.asarray(targets, dtype=float)[t]
    tr = t < split_index
    te = ~tr
    if not te.any():
        raise ShapeError("no test rows after the split")
    Xtr, Ytr = values[tr], y[tr]

    if spec.selection == VALIDATION:
        n_fit = spec.washout + int(round((Xtr.shape[0] - spec.washout) * (1 - spec.validation_fraction)))
        score_X, score_Y = Xtr[n_fit:], Ytr[n_fit:]
        sel_X, sel_Y = Xtr[:n_fit], Ytr[:n_fit]
    else:
        score_X, score_Y = values[te], y[te]
        sel_X, sel_Y = Xtr, Ytr

    best = None
    for l2 in spec.l2_grid:
        warm = None
        # strongest l1 first, each fit warm-started from the previous one
        for l1 in sorted(spec.l1_grid, reverse=True):
            model = fit_elastic_net(sel_X, sel_Y, spec.config(l1, l2), init=warm)
            warm = model.coefficients
            score = float(np.mean(rmse(predict(model, score_X), score_Y)))
            if best is None or score < best[0]:
                best = (score, l1, l2, model)
    _, l1, l2, model = best
    if spec.selection == VALIDATION:
        model = fit_elastic_net(Xtr, Ytr, spec.config(l1, l2))
    pred = predict(model, values)
    return FitResult(
        train_rmse=rmse(pred[tr], y[tr], skip=spec.washout),
        test_rmse=rmse(pred[te], y[te]),
        l1=l1, l2=l2, model=model, t=t, predictions=pred, targets=y, selection=spec.selection,
    )


def qesn_features(dataset: LorenzDataset, params: QesnParams, **kw):
    """Distribution and expectation features from one reservoir run."""
    dist_params = replace(params, feature_mode=DISTRIBUTION)
    weights = init_weights(dist_params)
    fm = run_qesn(dataset.inputs, weights, dist_params, **kw)
    ev = FeatureMatrix(fm.t, expectation_features(fm.values), EXPECTATION, dict(fm.meta))
    return {DISTRIBUTION: fm, EXPECTATION: ev}, weights


def esn_features(dataset: LorenzDataset, params: EsnParams, context_len=4, max_reseeds=100):
    t, _ = context_windows(dataset.inputs, context_len)
    state = init_esn(params, 1, max_reseeds=max_reseeds)
    return FeatureMatrix(t, esn_run(state, dataset.inputs)[t], "esn")


def baseline_features(dataset: LorenzDataset, context_len=4):
    t, windows = context_windows(dataset.inputs, context_len)
    return FeatureMatrix(t, windows, "window")


ESN_GRID = {"spectral_radius": (0.8, 0.9, 0.99), "input_scale": (0.1, 0.5, 1.0)}


def esn_candidates(n_nodes, seed, grid=None, **fixed):
    grid = grid or ESN_GRID
    for sr, isc in itertools.product(grid["spectral_radius"], grid["input_scale"]):
        yield EsnParams(n_nodes=n_nodes, spectral_radius=sr, input_scale=isc, seed=seed, **fixed)


def evaluate_esn(dataset, n_nodes, seed, spec=RegressionSpec(), context_len=4, grid=None, **fixed):
    """Tune the ESN over the hyperparameter grid; returns (best FitResult, best EsnParams)."""
    best = None
    for params in esn_candidates(n_nodes, seed, grid, **fixed):
        fm = esn_features(dataset, params, context_len)
        res = fit_readout(fm.t, fm.values, dataset.targets, dataset.split_index, spec)
        if best is None or res.test < best[0].test:
            best = (res, params)
    return best


def evaluate_baseline(dataset, spec=RegressionSpec(), context_len=4):
    """Windowed linear model: ridge only, so the l1 grid collapses to 0."""
    ridge = replace(spec, l1_grid=(0.0,))
    fm = baseline_features(dataset, context_len)
    return fit_readout(fm.t, fm.values, dataset.targets, dataset.split_index, ridge)


@dataclass
class RunReport:
    label: str
    per_seed: dict = field(default_factory=dict)   # seed -> FitResult.summary()
    config_hash: str = ""
    wall_time: float = 0.0
    circuit: dict = field(default_factory=dict)

    @property
    def best_seed(self):
        return min(self.per_seed, key=lambda s: self.per_seed[s]["test_rmse"])

    @property
    def best_test(self):
        return self.per_seed[self.best_seed]["test_rmse"]

    def to_dict(self):
        return {
            "label": self.label, "config_hash": self.config_hash, "wall_time": self.wall_time,
            "best_seed": self.best_seed, "best_test_rmse": self.best_test,
            "best_train_rmse": self.per_seed[self.best_seed]["train_rmse"],
            "per_seed": {str(k): v for k, v in self.per_seed.items()}, "circuit": self.circuit,
        }


def qesn_sweep(dataset, base: QesnParams, seeds, spec=RegressionSpec()):
    """Both feature modes for every seed; returns ``{mode: RunReport}``."""
    reports = {m: RunReport(label=m) for m in (DISTRIBUTION, EXPECTATION)}
    for seed in seeds:
        t0 = time.perf_counter()
        params = replace(base, seed=int(seed))
        feats, weights = qesn_features(dataset, params)
        for mode, fm in feats.items():
            res = fit_readout(fm.t, fm.values, dataset.targets, dataset.split_index, spec)
            rep = reports[mode]
            rep.per_seed[int(seed)] = res.summary()
            rep.circuit = circuit_stats(weights, params, dataset.inputs)
            rep.wall_time += time.perf_counter() - t0
    h = config_hash({"qesn": asdict(base), "regression": asdict(spec), "seeds": list(seeds)})
    for rep in reports.values():
        rep.config_hash = h
    return reports


def format_table(rows):
    """Table-1-shaped text. ``rows`` maps n_qubits -> {column: (train, test)}."""
    cols = ["expectation", "distribution", "distribution+noise"]
    lines = [f"{'':>16}" + "".join(f"{c:>22}" for c in cols)]
    for n in sorted(rows):
        lines.append(f"{n} qubits")
        for k, name in ((0, "train RMSE"), (1, "test RMSE")):
            cells = []
            for c in cols:
                v = rows[n].get(c)
                cells.append(f"{v[k]:>22.4f}" if v is not None else f"{'-':>22}")
            lines.append(f"{name:>16}" + "".join(cells))
    return "\n".join(lines)
