"""Plain-text file formats: dataset, feature, model and prediction CSVs.

Every file starts with ``# key=value`` comment lines (at least the config
hash); numpy's loaders skip them. Nothing time-dependent is written, so
identical inputs give byte-identical files.
"""
from __future__ import annotations

import json
import os

import numpy as np

from .errors import DataError, ShapeError
from .lorenz import LorenzDataset, LorenzParams
from .readout import ReadoutModel, RidgeElasticConfig
from .reservoir import FeatureMatrix

DATASET_CSV = "dataset.csv"
DATASET_META = "dataset.meta.json"


def _header_lines(meta):
    return "".join(f"# {k}={v}\n" for k, v in meta.items())


def read_header(path):
    """The ``# key=value`` lines at the top of a file, as strings."""
    meta = {}
    with open(path) as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
    return meta


def _write_table(path, columns, rows, fmts, meta):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="\n") as f:
        f.write(_header_lines(meta))
        f.write(",".join(columns) + "\n")
        np.savetxt(f, rows, fmt=fmts, delimiter=",")


def _read_table(path):
    if not os.path.exists(path):
        raise FileNotFoundError(f"missing file: {path}")
    with open(path) as f:
        for line in f:
            if not line.startswith("#"):
                columns = line.strip().split(",")
                break
        else:
            raise DataError(f"{path}: no header row")
        data = np.loadtxt(f, delimiter=",", ndmin=2)
    if data.size and data.shape[1] != len(columns):
        raise ShapeError(f"{path}: {data.shape[1]} columns but header lists {len(columns)}")
    return columns, data.reshape(-1, len(columns))


# dataset ---------------------------------------------------------------

def write_dataset(directory, dataset: LorenzDataset, config_hash=""):
    """``dataset.csv`` (t,x,y,z normalized) plus a JSON sidecar."""
    n = len(dataset)
    rows = np.column_stack([np.arange(n), dataset.samples])
    csv_path = os.path.join(directory, DATASET_CSV)
    _write_table(csv_path, ["t", "x", "y", "z"], rows, ["%d"] + ["%.17g"] * 3,
                 {"config_hash": config_hash})
    meta = {
        "config_hash": config_hash,
        "lorenz": dataset.params.to_dict(),
        "n_points": n,
        "split_index": int(dataset.split_index),
        "mean": dataset.mean.tolist(),
        "scale": dataset.scale.tolist(),
    }
    meta_path = os.path.join(directory, DATASET_META)
    with open(meta_path, "w") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")
    return csv_path, meta_path


def read_dataset(directory):
    columns, data = _read_table(os.path.join(directory, DATASET_CSV))
    if columns != ["t", "x", "y", "z"]:
        raise DataError(f"unexpected dataset columns {columns}")
    meta_path = os.path.join(directory, DATASET_META)
    if not os.path.exists(meta_path):
        raise FileNotFoundError(f"missing file: {meta_path}")
    with open(meta_path) as f:
        meta = json.load(f)
    params = LorenzParams(**meta["lorenz"])
    ds = LorenzDataset(data[:, 1:], np.array(meta["mean"]), np.array(meta["scale"]),
                       int(meta["split_index"]), params)
    return ds, meta


# features --------------------------------------------------------------

def write_features(path, fm: FeatureMatrix, config_hash="", **extra):
    cols = ["t"] + [f"f{i}" for i in range(fm.n_features)]
    rows = np.column_stack([fm.t, fm.values])
    meta = {"config_hash": config_hash, "mode": fm.mode, **extra}
    _write_table(path, cols, rows, ["%d"] + ["%.12g"] * fm.n_features, meta)
    return path


def read_features(path):
    meta = read_header(path)
    columns, data = _read_table(path)
    if not columns or columns[0] != "t":
        raise DataError(f"{path}: first column must be t")
    return FeatureMatrix(data[:, 0].astype(int), data[:, 1:], meta.get("mode", ""), meta)


# models and predictions ------------------------------------------------

def write_model(path, model: ReadoutModel, config_hash="", **extra):
    """Coefficients for raw (unstandardized) features, one row per (feature, target)."""
    w, b = model.raw_coefficients()
    cfg = model.config
    meta = {
        "config_hash": config_hash,
        "l1_weight": repr(cfg.l1_weight), "l2_weight": repr(cfg.l2_weight),
        "washout": cfg.washout,
        "intercept": ";".join(repr(float(v)) for v in b),
        **extra,
    }
    f_idx, t_idx = np.meshgrid(np.arange(w.shape[0]), np.arange(w.shape[1]), indexing="ij")
    rows = np.column_stack([f_idx.ravel(), t_idx.ravel(), w.ravel()])
    _write_table(path, ["feature", "target", "coefficient"], rows, ["%d", "%d", "%.17g"], meta)
    return path


def read_model(path):
    meta = read_header(path)
    _, data = _read_table(path)
    f_idx, t_idx = data[:, 0].astype(int), data[:, 1].astype(int)
    w = np.zeros((f_idx.max() + 1, t_idx.max() + 1))
    w[f_idx, t_idx] = data[:, 2]
    b = np.array([float(v) for v in meta["intercept"].split(";")])
    cfg = RidgeElasticConfig(float(meta["l1_weight"]), float(meta["l2_weight"]), int(meta["washout"]))
    p = w.shape[0]
    return ReadoutModel(w, b, cfg, np.zeros(p), np.ones(p))


def write_predictions(path, t, targets, predictions, config_hash="", names=("y", "z"), **extra):
    targets = np.asarray(targets, dtype=float)
    predictions = np.asarray(predictions, dtype=float)
    if targets.shape != predictions.shape or targets.shape[1] != len(names):
        raise ShapeError("targets, predictions and names disagree")
    cols = ["t"]
    blocks = [np.asarray(t)]
    for k, name in enumerate(names):
        cols += [f"{name}_true", f"{name}_pred"]
        blocks += [targets[:, k], predictions[:, k]]
    _write_table(path, cols, np.column_stack(blocks), ["%d"] + ["%.12g"] * (2 * len(names)),
                 {"config_hash": config_hash, **extra})
    return path


def write_json(path, obj):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")
    return path
