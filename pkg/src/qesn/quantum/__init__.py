"""Gate-level simulator: statevector trajectories, exact density matrices, noise."""
from .density import (
    MAX_DM_QUBITS,
    dm_apply_gate,
    dm_from_state,
    dm_measure_reset_channel,
    init_dm,
    partial_trace,
)
from .gates import Gate, cnot, crx, cry, crz, rotation, rotation_matrix
from .noise import (
    NoiseParams,
    apply_stochastic_pauli,
    dm_depolarize,
    readout_bitflip,
    readout_transition,
)
from .statevector import (
    MAX_QUBITS,
    apply_gate,
    bits_from_index,
    index_from_bits,
    init_state,
    marginal_probs,
    measure_collapse_reset,
)

__all__ = [
    "Gate", "cnot", "crx", "cry", "crz", "rotation", "rotation_matrix",
    "MAX_QUBITS", "init_state", "apply_gate", "marginal_probs", "measure_collapse_reset",
    "bits_from_index", "index_from_bits",
    "MAX_DM_QUBITS", "init_dm", "dm_from_state", "dm_apply_gate", "dm_measure_reset_channel",
    "partial_trace",
    "NoiseParams", "apply_stochastic_pauli", "dm_depolarize", "readout_bitflip",
    "readout_transition",
]
