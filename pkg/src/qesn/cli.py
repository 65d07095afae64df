"""Command-line experiment runner.

    qesn generate-data --config cfg.json --out runs/x
    qesn run-qesn      --config cfg.json --out runs/x
    qesn run-esn       --config cfg.json --out runs/x
    qesn run-baseline  --config cfg.json --out runs/x
    qesn fit-report    --config cfg.json --out runs/x

Each step reads what the previous ones wrote under ``--out``. Failures print
``error[<category>]: <message>`` to stderr and exit nonzero.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from . import io
from .config import load_config
from .errors import ConfigError, DataError, QesnError, ShapeError
from .experiment import (
    FitResult,
    RunReport,
    baseline_features,
    config_hash,
    esn_features,
    fit_readout,
    format_table,
    qesn_features,
)
from .lorenz import make_dataset
from .reservoir import DISTRIBUTION, EXPECTATION, circuit_stats

EXIT_CODES = {"config": 2, "io": 3}
PAPER_PROTOCOL_NOTE = ("selection: paper protocol (penalty pair chosen by test RMSE; "
                       "this looks at the test set)")
VALIDATION_NOTE = "selection: validation split carved from the training rows"


def _map(fn, items, workers):
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _features_dir(out):
    return os.path.join(out, "features")


def _qesn_stem(label, seed):
    return f"{label}_seed{seed}"


def _esn_stem(params):
    return f"esn_n{params.n_nodes}_sr{params.spectral_radius:g}_in{params.input_scale:g}_seed{params.seed}"


def _baseline_stem(context_len):
    return f"baseline_c{context_len}"


def _load_dataset(cfg, out):
    ds, meta = io.read_dataset(out)
    if meta.get("config_hash") != cfg.dataset_hash():
        raise DataError("dataset on disk was generated from a different dataset section; "
                        "rerun generate-data")
    return ds


# -- commands ----------------------------------------------------------------

def cmd_generate_data(cfg, out):
    ds = make_dataset(cfg.lorenz_params(), cfg.n_points, cfg.split)
    paths = io.write_dataset(out, ds, cfg.dataset_hash())
    return {"rows": len(ds), "files": list(paths)}


def cmd_run_qesn(cfg, out):
    ds = _load_dataset(cfg, out)
    fdir = _features_dir(out)
    kw = cfg.runner_kw()
    jobs = [(label, base, seed) for label, base in cfg.qesn_variants() for seed in cfg.seeds]

    def run(job):
        label, base, seed = job
        params = replace(base, seed=seed)
        t0 = time.perf_counter()
        feats, weights = qesn_features(ds, params, **kw)
        wall = time.perf_counter() - t0
        h = config_hash({"dataset": cfg.dataset_hash(), "qesn": params})
        stem = _qesn_stem(label, seed)
        for mode, fm in feats.items():
            io.write_features(os.path.join(fdir, f"{stem}_{mode}.csv"), fm, h,
                              dataset_hash=cfg.dataset_hash(), seed=seed)
        stats = {"config_hash": h, "dataset_hash": cfg.dataset_hash(), "seed": seed,
                 "wall_time": wall, "circuit": circuit_stats(weights, params, ds.inputs)}
        io.write_json(os.path.join(fdir, f"{stem}.json"), stats)
        return stem

    return {"runs": _map(run, jobs, cfg.seed_workers)}


def cmd_run_esn(cfg, out):
    ds = _load_dataset(cfg, out)
    fdir = _features_dir(out)
    reseeds = int(cfg.esn.get("max_reseeds", 100))
    jobs = [p for seed in cfg.seeds for p in cfg.esn_params(seed)]

    def run(params):
        fm = esn_features(ds, params, cfg.esn_context_len, reseeds)
        h = config_hash({"dataset": cfg.dataset_hash(), "esn": params})
        stem = _esn_stem(params)
        io.write_features(os.path.join(fdir, f"{stem}.csv"), fm, h, dataset_hash=cfg.dataset_hash(),
                          seed=params.seed)
        return stem

    return {"runs": _map(run, jobs, cfg.seed_workers)}


def cmd_run_baseline(cfg, out):
    ds = _load_dataset(cfg, out)
    c = int(cfg.require("baseline").get("context_len", cfg.context_len))
    fm = baseline_features(ds, c)
    h = config_hash({"dataset": cfg.dataset_hash(), "baseline": {"context_len": c}})
    stem = _baseline_stem(c)
    io.write_features(os.path.join(_features_dir(out), f"{stem}.csv"), fm, h,
                      dataset_hash=cfg.dataset_hash())
    return {"runs": [stem]}


def _fit_file(path, ds, spec, dataset_hash):
    fm = io.read_features(path)
    if fm.meta.get("dataset_hash") != dataset_hash:
        raise DataError(f"{path} was computed from a different dataset")
    return fit_readout(fm.t, fm.values, ds.targets, ds.split_index, spec), fm


def _check_widths(label, widths):
    if len(set(widths)) > 1:
        raise ShapeError(f"{label}: inconsistent feature widths across seeds {sorted(set(widths))}")


def cmd_fit_report(cfg, out):
    ds = _load_dataset(cfg, out)
    spec = cfg.regression_spec()
    dh, rh = cfg.dataset_hash(), cfg.regression_hash()
    fdir = _features_dir(out)
    reports = {}     # group label -> RunReport
    best_fits = {}   # group label -> (seed, FitResult)

    def add(label, seed, res: FitResult, extra=None):
        rep = reports.setdefault(label, RunReport(label=label))
        rep.per_seed[seed] = {**res.summary(), **(extra or {})}
        if label not in best_fits or res.test < best_fits[label][1].test:
            best_fits[label] = (seed, res)

    table = {}
    if cfg.qesn is not None:
        for label, base in cfg.qesn_variants():
            noisy = label.endswith("_noisy")
            for mode in (DISTRIBUTION, EXPECTATION):
                if noisy and mode == EXPECTATION:
                    continue
                group = f"{label}_{mode}"
                widths = []
                for seed in cfg.seeds:
                    stem = _qesn_stem(label, seed)
                    res, fm = _fit_file(os.path.join(fdir, f"{stem}_{mode}.csv"), ds, spec, dh)
                    widths.append(fm.n_features)
                    add(group, seed, res)
                    stats_path = os.path.join(fdir, f"{stem}.json")
                    if os.path.exists(stats_path):
                        with open(stats_path) as f:
                            stats = json.load(f)
                        reports[group].circuit = stats["circuit"]
                        reports[group].wall_time += stats["wall_time"]
                _check_widths(group, widths)
                rep = reports[group]
                col = "distribution+noise" if noisy else mode
                table.setdefault(base.n_qubits, {})[col] = (
                    rep.per_seed[rep.best_seed]["train_rmse"], rep.best_test)

    classical = []
    if cfg.esn is not None:
        for n in cfg.esn_node_counts():
            group = f"esn_n{n}"
            widths = []
            for seed in cfg.seeds:
                best = None
                for params in cfg.esn_params(seed):
                    if params.n_nodes != n:
                        continue
                    res, fm = _fit_file(os.path.join(fdir, f"{_esn_stem(params)}.csv"), ds, spec, dh)
                    widths.append(fm.n_features)
                    if best is None or res.test < best[0].test:
                        best = (res, params)
                add(group, seed, best[0], {"spectral_radius": best[1].spectral_radius,
                                           "input_scale": best[1].input_scale})
            _check_widths(group, widths)
            classical.append(group)
    if cfg.baseline is not None:
        c = int(cfg.baseline.get("context_len", cfg.context_len))
        ridge = replace(spec, l1_grid=(0.0,))
        res, _ = _fit_file(os.path.join(fdir, f"{_baseline_stem(c)}.csv"), ds, ridge, dh)
        for seed in cfg.seeds:
            add("linear_baseline", seed, res)
        classical.append("linear_baseline")

    if not reports:
        raise ConfigError("nothing to report: config has no qesn, esn or baseline section")

    for group, rep in reports.items():
        rep.config_hash = config_hash({"dataset": dh, "regression": rh, "group": group,
                                       "seeds": cfg.seeds})
        seed, res = best_fits[group]
        if "csv" in cfg.formats:
            io.write_predictions(os.path.join(out, "predictions", f"{group}.csv"), res.t, res.targets,
                                 res.predictions, rep.config_hash, seed=seed,
                                 split_index=ds.split_index)
            io.write_model(os.path.join(out, "models", f"{group}.csv"), res.model, rep.config_hash,
                           seed=seed)

    note = PAPER_PROTOCOL_NOTE if spec.selection == "test" else VALIDATION_NOTE
    doc = {
        "dataset_hash": dh, "regression_hash": rh, "selection": note,
        "seeds": cfg.seeds, "groups": {g: r.to_dict() for g, r in reports.items()},
    }
    if "json" in cfg.formats:
        io.write_json(os.path.join(out, "report.json"), doc)
    if "txt" in cfg.formats:
        with open(os.path.join(out, "report.txt"), "w") as f:
            f.write(_report_text(table, reports, classical, dh, rh, note))
    return {"groups": sorted(reports)}


def _report_text(table, reports, classical, dh, rh, note):
    lines = [f"# dataset_hash={dh}", f"# regression_hash={rh}", f"# {note}", ""]
    if table:
        lines += ["Best-seed RMSE (normalized targets, mean over y and z)", format_table(table), ""]
    if classical:
        lines.append(f"{'classical':>16}{'train RMSE':>14}{'test RMSE':>14}")
        for g in classical:
            rep = reports[g]
            lines.append(f"{g:>16}{rep.per_seed[rep.best_seed]['train_rmse']:>14.4f}{rep.best_test:>14.4f}")
        lines.append("")
    lines.append("Per-seed test RMSE")
    for g, rep in reports.items():
        vals = " ".join(f"{s}:{v['test_rmse']:.4f}" for s, v in rep.per_seed.items())
        lines.append(f"  {g}: {vals}  (best seed {rep.best_seed}, hash {rep.config_hash})")
    return "\n".join(lines) + "\n"


COMMANDS = {
    "generate-data": cmd_generate_data,
    "run-qesn": cmd_run_qesn,
    "run-esn": cmd_run_esn,
    "run-baseline": cmd_run_baseline,
    "fit-report": cmd_fit_report,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="qesn", description="Quantum echo-state network experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--out", default=None, help="output directory (default: output.dir)")
        p.add_argument("--seed-override", type=int, default=None,
                       help="replace the config's seed list with this single seed")
    return parser


def _category(exc):
    if isinstance(exc, QesnError):
        return exc.category
    if isinstance(exc, (FileNotFoundError, PermissionError, IsADirectoryError, OSError)):
        return "io"
    if isinstance(exc, (KeyError, TypeError)):
        return "config"
    return "internal"


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.seed_override)
        out = args.out or cfg.output.get("dir")
        if not out:
            raise ConfigError("no output directory: pass --out or set output.dir")
        os.makedirs(out, exist_ok=True)
        result = COMMANDS[args.command](cfg, out)
    except Exception as exc:  # noqa: BLE001 - every failure becomes one error line
        cat = _category(exc)
        print(f"error[{cat}]: {exc}", file=sys.stderr)
        return EXIT_CODES.get(cat, 1)
    print(f"{args.command}: ok {json.dumps(result, default=str)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
