"""Dense n-qubit state vectors and two-qubit gate application.

Bit convention, fixed package-wide: qubit ``k`` is bit ``k`` of the basis
index, so qubit 0 is the least-significant bit.  A two-qubit gate acting on
qubits ``(i, j)`` is a 4x4 matrix indexed by the local two-bit word
``2*b_i + b_j`` (the bit of qubit ``i`` is the most-significant local bit).
Consequently ``kron(u, v)`` acts as ``u`` on qubit ``i`` and ``v`` on
qubit ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidPlacementError

NORM_TOL = 1e-9
UNITARY_TOL = 1e-12

SQRT2 = float(np.sqrt(2.0))

HADAMARD_1Q = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / SQRT2
IDENTITY_2Q = np.eye(4, dtype=complex)
SWAP_2Q = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def unitarity_defect(matrix: np.ndarray) -> float:
    """Max-entry deviation of ``M^dag M`` from the identity."""
    m = np.asarray(matrix)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


@dataclass(frozen=True)
class TwoQubitGate:
    """A unitary 4x4 gate in the local ``2*b_i + b_j`` index convention."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"gate must be 4x4, got {m.shape}")
        defect = unitarity_defect(m)
        if defect > UNITARY_TOL:
            raise ValueError(f"gate is not unitary: defect {defect:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    def adjoint(self) -> "TwoQubitGate":
        return TwoQubitGate(self.entries.conj().T)


@dataclass(frozen=True)
class PureState:
    """Normalized complex amplitude vector over ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.n_qubits,):
            raise ValueError(
                f"expected {2**self.n_qubits} amplitudes, got {amps.shape}"
            )
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |norm^2 - 1| = {abs(norm2-1):.3e}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "PureState":
        if not 0 <= index < 2**n_qubits:
            raise ValueError(f"basis index {index} out of range for n={n_qubits}")
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def uniform(cls, n_qubits: int) -> "PureState":
        dim = 2**n_qubits
        return cls(n_qubits, np.full(dim, 1.0 / np.sqrt(dim), dtype=complex))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "PureState") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def apply_matrix_to_qubits(
    vec: np.ndarray, n_qubits: int, matrix: np.ndarray, qubits: tuple[int, ...]
) -> np.ndarray:
    """Apply a ``2^k x 2^k`` matrix to the listed qubits of a raw vector.

    ``qubits[0]`` is the most-significant bit of the matrix's local index.
    Works on any array whose leading dimension is ``2**n_qubits``; extra
    trailing dimensions are treated as a batch.
    """
    k = len(qubits)
    batch_shape = vec.shape[1:]
    tensor = vec.reshape((2,) * n_qubits + batch_shape)
    # Axis of qubit q in the reshaped tensor (most-significant bit first).
    axes = [n_qubits - 1 - q for q in qubits]
    mat_t = np.asarray(matrix, dtype=complex).reshape((2,) * (2 * k))
    moved = np.tensordot(mat_t, tensor, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(moved, list(range(k)), axes)
    return np.ascontiguousarray(out).reshape((2**n_qubits,) + batch_shape)


def apply_gate(state: PureState, gate: TwoQubitGate, i: int, j: int) -> PureState:
    """Apply ``gate`` to qubits ``i`` (most-significant local bit) and ``j``."""
    n = state.n_qubits
    if i == j or not (0 <= i < n) or not (0 <= j < n):
        raise InvalidPlacementError(f"invalid qubit pair ({i}, {j}) for n={n}")
    out = apply_matrix_to_qubits(state.amplitudes, n, gate.entries, (i, j))
    return PureState(n, out)


def fwht_normalized(vec: np.ndarray) -> np.ndarray:
    """Walsh-Hadamard transform along the first axis, normalized.

    Equals applying the single-qubit Hadamard to every qubit; self-inverse.
    Trailing dimensions are treated as a batch.
    """
    out = np.array(vec, dtype=complex)
    dim = out.shape[0]
    work = out.reshape(dim, -1)
    h = 1
    while h < dim:
        work = work.reshape(dim // (2 * h), 2, h, -1)
        a = work[:, 0].copy()
        work[:, 0] = a + work[:, 1]
        work[:, 1] = a - work[:, 1]
        work = work.reshape(dim, -1)
        h *= 2
    return (work / np.sqrt(dim)).reshape(out.shape)
