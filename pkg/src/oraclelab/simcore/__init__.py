"""Dense simulation core: states, gates, random circuits, group Fourier matrices."""

from .circuits import (
    CircuitUnitary,
    HadamardAll,
    MatrixUnitary,
    RandomCircuit,
    action_matrix,
    adjoint_rows,
    basis_vector,
    hadamard_all,
    run_random_circuit,
    sample_haar_two_qubit,
)
from .groups import (
    FourierMatrix,
    GroupSpec,
    Irrep,
    builtin_group,
    cyclic_group,
    dump_matrix_csv,
    group_fourier,
    load_group_json,
    qft_cyclic,
    xor_group,
)
from .rng import child, mix64, stream
from .states import (
    HADAMARD_1Q,
    IDENTITY_2Q,
    SWAP_2Q,
    PureState,
    TwoQubitGate,
    apply_gate,
    apply_matrix_to_qubits,
    fwht_normalized,
    unitarity_defect,
)

__all__ = [
    "CircuitUnitary",
    "FourierMatrix",
    "GroupSpec",
    "HADAMARD_1Q",
    "HadamardAll",
    "IDENTITY_2Q",
    "Irrep",
    "MatrixUnitary",
    "PureState",
    "RandomCircuit",
    "SWAP_2Q",
    "TwoQubitGate",
    "action_matrix",
    "adjoint_rows",
    "apply_gate",
    "apply_matrix_to_qubits",
    "basis_vector",
    "builtin_group",
    "child",
    "cyclic_group",
    "dump_matrix_csv",
    "fwht_normalized",
    "group_fourier",
    "hadamard_all",
    "load_group_json",
    "mix64",
    "qft_cyclic",
    "run_random_circuit",
    "sample_haar_two_qubit",
    "stream",
    "unitarity_defect",
    "xor_group",
]
