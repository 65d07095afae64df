"""Quantum echo-state networks on a small numpy statevector / density-matrix simulator.

Submodules:

- :mod:`qesn.quantum`    gates, batched statevectors, density matrices, noise
- :mod:`qesn.reservoir`  QESN circuit, trajectory sampling and exact mode
- :mod:`qesn.readout`    elastic-net readout by coordinate descent
- :mod:`qesn.lorenz`     Lorenz-63 data
- :mod:`qesn.esn`        classical ESN and windowed linear baseline
- :mod:`qesn.experiment` fitting and reporting helpers
- :mod:`qesn.cli`        the ``qesn`` command
"""
from .errors import QesnError
from .esn import EsnParams, esn_run, init_esn, linear_baseline
from .lorenz import LorenzParams, make_dataset
from .quantum import NoiseParams
from .readout import RidgeElasticConfig, fit_elastic_net, predict, rmse
from .reservoir import (
    FeatureMatrix,
    QesnParams,
    init_weights,
    run_qesn,
    run_reservoir,
    run_reservoir_exact,
)

__version__ = "0.1.0"

__all__ = [
    "EsnParams", "FeatureMatrix", "LorenzParams", "NoiseParams", "QesnError", "QesnParams",
    "RidgeElasticConfig", "esn_run", "fit_elastic_net", "init_esn", "init_weights",
    "linear_baseline", "make_dataset", "predict", "rmse", "run_qesn", "run_reservoir",
    "run_reservoir_exact",
]
