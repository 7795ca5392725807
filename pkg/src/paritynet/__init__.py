"""Simulation toolkit for quantum networks built on two-qubit parity measurements."""

from .circuits import (
    BranchResult,
    Circuit,
    Gate,
    ParityMeasurement,
    ZMeasurement,
    apply_gate,
    execute_all_branches,
    execute_sample,
    parity_measure,
)
from .qstate import (
    PauliString,
    PureState,
    Qubit,
    QubitRegister,
    apply_pauli_string,
    basis_state,
    bell_state,
    binary_parity,
    fidelity_up_to_global_phase,
    ghz_state,
)

__version__ = "0.1.0"

__all__ = [
    "BranchResult",
    "Circuit",
    "Gate",
    "ParityMeasurement",
    "PauliString",
    "PureState",
    "Qubit",
    "QubitRegister",
    "ZMeasurement",
    "apply_gate",
    "apply_pauli_string",
    "basis_state",
    "bell_state",
    "binary_parity",
    "execute_all_branches",
    "execute_sample",
    "fidelity_up_to_global_phase",
    "ghz_state",
    "parity_measure",
]
