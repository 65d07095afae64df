"""JSON experiment configuration.

Schema (every section optional except where a command needs it)::

    {
      "dataset":    {"n_points": 9900, "split": 6900, "lorenz": {LorenzParams fields}},
      "qesn":       {"n_qubits": [4, 8], "noisy_qubits": [8], "noise": {NoiseParams fields},
                     "context_len": 4, "reupload_blocks": 3, "sparsity": 0.5,
                     "shots": 60000, "exact_mode": false, "input_scale": 1.0,
                     "batch_size": 4096, "workers": 1},
      "esn":        {"n_nodes": [4], "grid": {"spectral_radius": [...], "input_scale": [...]},
                     "density": 0.2, "leak_rate": 1.0, "bias_scale": 1.0, "max_reseeds": 100},
      "baseline":   {"context_len": 4},
      "regression": {RegressionSpec fields},
      "output":     {"dir": "runs/x", "formats": ["csv", "json", "txt"]},
      "seeds":      [1, 2, 3, 4, 5],
      "seed_workers": 1
    }

``esn.n_nodes`` defaults to half of each ``qesn.n_qubits`` entry (the
readout register size).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields

from .errors import ConfigError
from .esn import EsnParams
from .experiment import ESN_GRID, RegressionSpec, config_hash
from .lorenz import LorenzParams
from .quantum.noise import NoiseParams
from .reservoir import QesnParams

DEFAULT_SEEDS = (1, 2, 3, 4, 5)
FORMATS = ("csv", "json", "txt")

_QESN_RUNNER_KEYS = {"n_qubits", "noisy_qubits", "noise", "batch_size", "workers"}
_ESN_RUNNER_KEYS = {"n_nodes", "grid", "max_reseeds", "context_len"}


def _check_keys(section, allowed, name):
    extra = set(section) - set(allowed)
    if extra:
        raise ConfigError(f"unknown keys in '{name}': {sorted(extra)}")


def _names(cls):
    return {f.name for f in fields(cls)}


@dataclass
class ExperimentConfig:
    dataset: dict = field(default_factory=dict)
    qesn: dict = None
    esn: dict = None
    baseline: dict = None
    regression: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    seeds: list = field(default_factory=lambda: list(DEFAULT_SEEDS))
    seed_workers: int = 1

    def __post_init__(self):
        if not self.seeds:
            raise ConfigError("seeds must be non-empty")
        for s in self.seeds:
            if not isinstance(s, int) or isinstance(s, bool) or not 0 <= s < 2**64:
                raise ConfigError(f"seed {s!r} is not a 64-bit unsigned integer")
        _check_keys(self.dataset, {"n_points", "split", "lorenz"}, "dataset")
        _check_keys(self.output, {"dir", "formats"}, "output")
        for fmt in self.output.get("formats", FORMATS):
            if fmt not in FORMATS:
                raise ConfigError(f"unknown output format {fmt!r}")
        # build once so bad values fail before any work starts
        self.lorenz_params()
        self.regression_spec()
        if self.qesn is not None:
            self.qesn_variants()
        if self.esn is not None:
            list(self.esn_params(self.seeds[0]))

    # -- sections -> typed objects --------------------------------------

    @property
    def n_points(self):
        return int(self.dataset.get("n_points", 9900))

    @property
    def split(self):
        return int(self.dataset.get("split", 6900))

    def lorenz_params(self):
        kw = dict(self.dataset.get("lorenz", {}))
        _check_keys(kw, _names(LorenzParams), "dataset.lorenz")
        skip = kw.get("transient_skip", LorenzParams.transient_skip)
        kw.setdefault("n_steps", skip + self.n_points)
        return LorenzParams(**kw)

    def regression_spec(self):
        _check_keys(self.regression, _names(RegressionSpec), "regression")
        return RegressionSpec(**self.regression)

    def require(self, name):
        if getattr(self, name) is None:
            raise ConfigError(f"config has no '{name}' section")
        return getattr(self, name)

    def qesn_variants(self):
        """``[(label, QesnParams without seed)]`` for every qubit count and noise setting."""
        sec = dict(self.require("qesn"))
        _check_keys(sec, _names(QesnParams) | _QESN_RUNNER_KEYS, "qesn")
        counts = sec.pop("n_qubits", [8])
        counts = [counts] if isinstance(counts, int) else list(counts)
        noisy = sec.pop("noisy_qubits", [])
        noisy = [noisy] if isinstance(noisy, int) else list(noisy)
        noise_kw = sec.pop("noise", None) or {}
        _check_keys(noise_kw, _names(NoiseParams), "qesn.noise")
        for k in ("batch_size", "workers", "seed", "feature_mode"):
            sec.pop(k, None)
        out = []
        for n in counts:
            out.append((f"qesn_n{n}_noiseless", QesnParams(n_qubits=n, **sec)))
            if n in noisy:
                out.append((f"qesn_n{n}_noisy", QesnParams(n_qubits=n, noise=NoiseParams(**noise_kw), **sec)))
        for n in noisy:
            if n not in counts:
                raise ConfigError(f"noisy_qubits entry {n} is not in n_qubits")
        return out

    def runner_kw(self):
        sec = self.qesn or {}
        return {"batch_size": int(sec.get("batch_size", 4096)), "workers": int(sec.get("workers", 1))}

    def esn_node_counts(self):
        sec = self.require("esn")
        nodes = sec.get("n_nodes")
        if nodes is None:
            qs = (self.qesn or {}).get("n_qubits", [8])
            qs = [qs] if isinstance(qs, int) else qs
            nodes = sorted({q // 2 for q in qs})
        return [nodes] if isinstance(nodes, int) else list(nodes)

    def esn_grid(self):
        grid = dict(ESN_GRID)
        grid.update(self.require("esn").get("grid", {}))
        return grid

    def esn_params(self, seed):
        """Yields ``EsnParams`` for every node count and grid point."""
        sec = dict(self.require("esn"))
        _check_keys(sec, _names(EsnParams) | _ESN_RUNNER_KEYS, "esn")
        fixed = {k: v for k, v in sec.items()
                 if k not in _ESN_RUNNER_KEYS and k not in ("n_nodes", "seed", "spectral_radius", "input_scale")}
        grid = self.esn_grid()
        for n in self.esn_node_counts():
            for sr in grid["spectral_radius"]:
                for isc in grid["input_scale"]:
                    yield EsnParams(n_nodes=n, spectral_radius=sr, input_scale=isc, seed=seed, **fixed)

    @property
    def esn_context_len(self):
        return int((self.esn or {}).get("context_len", self.context_len))

    @property
    def context_len(self):
        return int((self.qesn or {}).get("context_len", (self.baseline or {}).get("context_len", 4)))

    @property
    def formats(self):
        return tuple(self.output.get("formats", FORMATS))

    # -- hashes -----------------------------------------------------------

    def dataset_hash(self):
        return config_hash({"lorenz": self.lorenz_params(), "n_points": self.n_points, "split": self.split})

    def regression_hash(self):
        return config_hash(self.regression_spec())


def parse_config(doc, seed_override=None):
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    known = _names(ExperimentConfig)
    _check_keys(doc, known, "config")
    kw = dict(doc)
    if seed_override is not None:
        kw["seeds"] = [int(seed_override)]
    for name in ("dataset", "regression", "output"):
        if kw.get(name) is None:
            kw[name] = {}
    return ExperimentConfig(**kw)


def load_config(path, seed_override=None):
    try:
        with open(path) as f:
            doc = json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(doc, seed_override)
