import json
import os
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qesn import io
from qesn.cli import main
from qesn.config import parse_config
from qesn.errors import ConfigError
from qesn.experiment import RegressionSpec, config_hash, fit_readout, qesn_features
from qesn.lorenz import make_dataset
from qesn.readout import predict
from qesn.reservoir import DISTRIBUTION, EXPECTATION, QesnParams

SMALL = {
    "dataset": {"n_points": 50, "split": 35},
    "qesn": {"n_qubits": [4], "noisy_qubits": [4], "exact_mode": True},
    "esn": {"grid": {"spectral_radius": [0.9], "input_scale": [0.5, 1.0]}},
    "baseline": {},
    "regression": {"washout": 5, "l1_grid": [0.0, 0.001], "l2_grid": [0.0, 0.01]},
    "seeds": [3, 4],
}


def write_cfg(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run_all(cfg, out):
    for cmd in ("generate-data", "run-qesn", "run-esn", "run-baseline", "fit-report"):
        assert main([cmd, "--config", cfg, "--out", out]) == 0, cmd


def read_bytes(path):
    with open(path, "rb") as f:
        return f.read()


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("small")
    cfg = write_cfg(tmp, SMALL)
    out = str(tmp / "out")
    run_all(cfg, out)
    return tmp, cfg, out


def test_generate_paper_scale(tmp_path):
    cfg = write_cfg(tmp_path, {"dataset": {"n_points": 9900, "split": 6900}})
    out = str(tmp_path / "a" / "b")  # nested and missing
    assert main(["generate-data", "--config", cfg, "--out", out]) == 0
    ds, meta = io.read_dataset(out)
    assert len(ds) == 9900 and meta["split_index"] == 6900
    with open(os.path.join(out, "dataset.csv")) as f:
        lines = f.read().splitlines()
    assert lines[0].startswith("# config_hash=") and lines[1] == "t,x,y,z"
    assert len(lines) == 2 + 9900
    first = read_bytes(os.path.join(out, "dataset.csv")), read_bytes(os.path.join(out, "dataset.meta.json"))
    assert main(["generate-data", "--config", cfg, "--out", out]) == 0
    again = read_bytes(os.path.join(out, "dataset.csv")), read_bytes(os.path.join(out, "dataset.meta.json"))
    assert first == again


def test_dataset_round_trip(tmp_path):
    ds = make_dataset(n_points=300, split=200)
    io.write_dataset(str(tmp_path), ds, "abc")
    back, _ = io.read_dataset(str(tmp_path))
    assert np.array_equal(back.samples, ds.samples)
    assert np.array_equal(back.mean, ds.mean) and back.split_index == 200


def test_feature_rows_and_files(small_run):
    _, _, out = small_run
    fm = io.read_features(os.path.join(out, "features", "qesn_n4_noiseless_seed3_distribution.csv"))
    assert len(fm) == 47 and fm.t[0] == 3 and fm.n_features == 4
    assert np.allclose(fm.values.sum(axis=1), 1, atol=1e-9)
    ev = io.read_features(os.path.join(out, "features", "qesn_n4_noiseless_seed3_expectation.csv"))
    assert ev.n_features == 2
    for name in ("report.txt", "report.json"):
        assert os.path.exists(os.path.join(out, name))
    # every CSV embeds a config hash
    for root, _, files in os.walk(out):
        for f in files:
            path = os.path.join(root, f)
            if f.endswith(".csv"):
                assert "config_hash" in io.read_header(path)
            elif f.endswith(".json"):
                assert "hash" in read_bytes(path).decode()


def test_rerun_identical_features(small_run, tmp_path):
    _, cfg, out = small_run
    out2 = str(tmp_path / "again")
    run_all(cfg, out2)
    for sub in ("features", "predictions", "models"):
        for f in sorted(os.listdir(os.path.join(out, sub))):
            if f.endswith(".csv"):
                assert read_bytes(os.path.join(out, sub, f)) == read_bytes(os.path.join(out2, sub, f)), f
    assert read_bytes(os.path.join(out, "report.txt")) == read_bytes(os.path.join(out2, "report.txt"))


def test_noise_changes_feature_file(small_run):
    _, _, out = small_run
    a = read_bytes(os.path.join(out, "features", "qesn_n4_noiseless_seed3_distribution.csv"))
    b = read_bytes(os.path.join(out, "features", "qesn_n4_noisy_seed3_distribution.csv"))
    assert a != b


def test_report_contents(small_run):
    _, _, out = small_run
    with open(os.path.join(out, "report.json")) as f:
        rep = json.load(f)
    assert "paper protocol" in rep["selection"]
    for g in rep["groups"].values():
        per = {int(s): v["test_rmse"] for s, v in g["per_seed"].items()}
        assert g["best_test_rmse"] == min(per.values())
        assert per[g["best_seed"]] == g["best_test_rmse"]
    assert set(rep["groups"]) >= {"qesn_n4_noiseless_distribution", "qesn_n4_noiseless_expectation",
                                  "qesn_n4_noisy_distribution", "esn_n2", "linear_baseline"}
    assert rep["groups"]["qesn_n4_noiseless_distribution"]["circuit"]["logical_depth_per_timestep"] > 0
    text = open(os.path.join(out, "report.txt")).read()
    assert "4 qubits" in text and "distribution+noise" in text and rep["dataset_hash"] in text
    pred = os.path.join(out, "predictions", "linear_baseline.csv")
    with open(pred) as f:
        header = [line for line in f if not line.startswith("#")][0].strip()
    assert header == "t,y_true,y_pred,z_true,z_pred"


def test_model_csv_round_trip(small_run):
    _, _, out = small_run
    model = io.read_model(os.path.join(out, "models", "linear_baseline.csv"))
    fm = io.read_features(os.path.join(out, "features", "baseline_c4.csv"))
    pred = predict(model, fm.values)
    table = np.loadtxt(os.path.join(out, "predictions", "linear_baseline.csv"), delimiter=",", skiprows=4)
    assert np.allclose(pred[:, 0], table[:, 2], atol=1e-9)
    assert np.allclose(pred[:, 1], table[:, 4], atol=1e-9)


def test_seed_override(tmp_path, small_run):
    _, cfg, out = small_run
    doc = parse_config(SMALL, seed_override=99)
    assert doc.seeds == [99]
    assert main(["run-qesn", "--config", cfg, "--out", out, "--seed-override", "99"]) == 0
    assert os.path.exists(os.path.join(out, "features", "qesn_n4_noiseless_seed99_distribution.csv"))


def test_error_lines(tmp_path, capsys):
    bad = write_cfg(tmp_path, {"dataset": {"n_points": 50, "split": 35}, "qesn": {"n_qubits": [5]}})
    assert main(["generate-data", "--config", bad, "--out", str(tmp_path / "o")]) == 2
    assert "error[config]" in capsys.readouterr().err

    cfg = write_cfg(tmp_path, SMALL, "ok.json")
    assert main(["run-qesn", "--config", cfg, "--out", str(tmp_path / "empty")]) == 3
    assert "error[io]" in capsys.readouterr().err

    assert main(["generate-data", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 3
    assert "error[io]" in capsys.readouterr().err

    big = write_cfg(tmp_path, {"dataset": {"n_points": 50, "split": 35},
                               "qesn": {"n_qubits": [14], "exact_mode": True}}, "big.json")
    assert main(["run-qesn", "--config", big, "--out", str(tmp_path)]) != 0
    assert "error[capacity]" in capsys.readouterr().err

    notjson = tmp_path / "x.json"
    notjson.write_text("{nope")
    assert main(["fit-report", "--config", str(notjson), "--out", str(tmp_path)]) == 2


def test_inconsistent_widths_shape_error(small_run, tmp_path, capsys):
    _, cfg, out = small_run
    path = os.path.join(out, "features", "qesn_n4_noiseless_seed4_distribution.csv")
    fm = io.read_features(path)
    saved = read_bytes(path)
    try:
        fm.values = fm.values[:, :3]
        io.write_features(path, fm, fm.meta["config_hash"], dataset_hash=fm.meta["dataset_hash"])
        assert main(["fit-report", "--config", cfg, "--out", out]) == 1
        assert "error[shape]" in capsys.readouterr().err
    finally:
        with open(path, "wb") as f:
            f.write(saved)


def test_config_validation():
    with pytest.raises(ConfigError):
        parse_config({"seeds": []})
    with pytest.raises(ConfigError):
        parse_config({"seeds": [-1]})
    with pytest.raises(ConfigError):
        parse_config({"bogus": 1})
    with pytest.raises(ConfigError):
        parse_config({"qesn": {"n_qubits": [4], "noisy_qubits": [8]}})


@settings(max_examples=25)
@given(st.dictionaries(st.text(min_size=1, max_size=5), st.integers() | st.floats(allow_nan=False) | st.text(),
                       min_size=1, max_size=8),
       st.integers(0, 1000))
def test_config_hash_ignores_key_order(d, seed):
    items = list(d.items())
    random.Random(seed).shuffle(items)
    assert config_hash(dict(items)) == config_hash(d)


def test_perfect_feature_gives_zero_error():
    ds = make_dataset(n_points=400, split=300)
    t = np.arange(3, 400)
    X = np.column_stack([ds.targets[t], np.random.default_rng(0).normal(size=len(t))])
    res = fit_readout(t, X, ds.targets, ds.split_index, RegressionSpec(washout=10))
    assert res.test < 1e-6


def test_distribution_never_worse_than_expectation_on_train():
    ds = make_dataset(n_points=700, split=500)
    params = QesnParams(n_qubits=6, exact_mode=True, seed=2)
    feats, _ = qesn_features(ds, params)
    spec = RegressionSpec(washout=50, l1_grid=(0.0,), l2_grid=(0.0,), tol=1e-12, max_iter=20000)
    d = fit_readout(feats[DISTRIBUTION].t, feats[DISTRIBUTION].values, ds.targets, ds.split_index, spec)
    e = fit_readout(feats[EXPECTATION].t, feats[EXPECTATION].values, ds.targets, ds.split_index, spec)
    assert np.all(d.train_rmse <= e.train_rmse + 1e-9)


def test_validation_selection_mode():
    ds = make_dataset(n_points=400, split=300)
    t = np.arange(3, 400)
    X = np.column_stack([ds.inputs[t], ds.inputs[t - 1], ds.inputs[t] ** 2])
    res = fit_readout(t, X, ds.targets, ds.split_index, RegressionSpec(washout=10, selection="validation"))
    assert res.selection == "validation" and np.isfinite(res.test)
