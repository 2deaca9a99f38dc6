import numpy as np
import pytest

from oraclelab.errors import InvalidConfigError
from oraclelab.simcore import (
    CircuitUnitary,
    action_matrix,
    basis_vector,
    hadamard_all,
    run_random_circuit,
    sample_haar_two_qubit,
    stream,
    unitarity_defect,
)


def test_haar_gates_are_unitary():
    rng = stream(1)
    for _ in range(50):
        gate = sample_haar_two_qubit(rng)
        assert unitarity_defect(gate.entries) <= 1e-12


def test_haar_first_and_second_moments():
    # Independent Monte Carlo oracle for E|u|^2 = 1/4 and E u = 0.
    rng = stream(2)
    samples = 10_000
    entries = np.empty(samples, dtype=complex)
    for k in range(samples):
        entries[k] = sample_haar_two_qubit(rng).entries[0, 0]
    assert abs(np.mean(np.abs(entries) ** 2) - 0.25) <= 0.01
    assert abs(np.mean(entries.real)) <= 0.02
    assert abs(np.mean(entries.imag)) <= 0.02


def test_haar_fourth_moment():
    # E|u|^4 = 2 / (d (d+1)) = 1/10 at d=4; allow 3 sigma of Monte Carlo error.
    rng = stream(3)
    samples = 10_000
    fourth = np.empty(samples)
    for k in range(samples):
        fourth[k] = np.abs(sample_haar_two_qubit(rng).entries[0, 0]) ** 4
    sigma = np.std(fourth, ddof=1) / np.sqrt(samples)
    assert abs(np.mean(fourth) - 0.1) <= 3 * sigma + 1e-4


def test_run_random_circuit_deterministic():
    a = run_random_circuit(4, 30, seed=11)
    b = run_random_circuit(4, 30, seed=11)
    for (i1, j1, g1), (i2, j2, g2) in zip(a.placements, b.placements):
        assert (i1, j1) == (i2, j2)
        np.testing.assert_array_equal(g1.entries, g2.entries)
    np.testing.assert_array_equal(
        a.state_from_basis(3).amplitudes, b.state_from_basis(3).amplitudes
    )


def test_zero_length_circuit_is_identity():
    circ = run_random_circuit(3, 0, seed=5)
    np.testing.assert_array_equal(
        circ.state_from_basis(6).amplitudes, basis_vector(3, 6)
    )


def test_two_qubit_circuit_always_uses_the_only_pair():
    circ = run_random_circuit(2, 20, seed=9)
    assert all({i, j} == {0, 1} for i, j, _g in circ.placements)


def test_invalid_configs_raise():
    with pytest.raises(InvalidConfigError):
        run_random_circuit(1, 5, seed=0)
    with pytest.raises(InvalidConfigError):
        run_random_circuit(3, -1, seed=0)


def test_circuit_action_adjoint_pair():
    circ = run_random_circuit(4, 25, seed=21)
    action = CircuitUnitary(circ)
    rng = stream(22)
    vec = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    vec /= np.linalg.norm(vec)
    roundtrip = action.apply(action.apply_adjoint(vec))
    np.testing.assert_allclose(roundtrip, vec, atol=1e-12)


def test_circuit_matrix_against_kron_reference():
    # Independent recomputation from the stored gate list: expand each gate
    # with explicit krons and index permutations, multiply in order.
    from test_states import dense_two_qubit_matrix

    circ = run_random_circuit(3, 12, seed=31)
    dim = 2**3
    ref = np.eye(dim, dtype=complex)
    for i, j, gate in circ.placements:
        ref = dense_two_qubit_matrix(gate.entries, 3, i, j) @ ref
    # ref is the forward product: the adjoint action of the circuit unitary.
    mat_u = action_matrix(CircuitUnitary(circ))
    np.testing.assert_allclose(mat_u.conj().T, ref, atol=1e-11)
    for a in range(dim):
        np.testing.assert_allclose(
            circ.state_from_basis(a).amplitudes, ref[:, a], atol=1e-12
        )


def test_hadamard_action_twice_is_identity():
    action = hadamard_all(3)
    rng = stream(33)
    vec = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    vec /= np.linalg.norm(vec)
    np.testing.assert_allclose(action.apply(action.apply(vec)), vec, atol=1e-12)
