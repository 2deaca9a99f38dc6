import numpy as np
import pytest

from oraclelab.dispersion import (
    certify_dispersing,
    collision,
    fourth_moment_check,
    l1_row,
    pseudo_search,
)
from oraclelab.errors import DegenerateInputError, InvalidConfigError
from oraclelab.simcore import (
    SWAP_2Q,
    CircuitUnitary,
    MatrixUnitary,
    PureState,
    TwoQubitGate,
    apply_gate,
    builtin_group,
    fwht_normalized,
    group_fourier,
    hadamard_all,
    qft_cyclic,
    run_random_circuit,
    stream,
)
from test_states import dense_two_qubit_matrix


def test_l1_identity_is_one():
    action = MatrixUnitary(np.eye(8, dtype=complex))
    for a in range(8):
        assert abs(l1_row(action, a) - 1.0) <= 1e-12


def test_l1_hadamard_is_2_to_half_n():
    action = hadamard_all(3)
    for a in range(8):
        assert abs(l1_row(action, a) - 2**1.5) <= 1e-9


def test_l1_random_circuit_against_dense_recomputation():
    n, t = 6, 4 * 6**3
    circ = run_random_circuit(n, t, seed=77)
    action = CircuitUnitary(circ)
    ref = np.eye(2**n, dtype=complex)
    for i, j, gate in circ.placements:
        ref = dense_two_qubit_matrix(gate.entries, n, i, j) @ ref
    beta = 0.25
    hits = 0
    for a in range(2**n):
        value = l1_row(action, a)
        independent = float(np.sum(np.abs(ref[:, a])))
        assert abs(value - independent) <= 1e-9
        assert 1.0 - 1e-9 <= value <= 2 ** (n / 2) + 1e-9
        hits += value >= beta * 2 ** (n / 2)
    assert hits >= 0.9 * 2**n  # most labels disperse at beta = 1/4


def test_certify_hadamard_full_alpha():
    report = certify_dispersing(hadamard_all(6), beta=1.0)
    assert len(report.achieving_set) == 64
    assert report.alpha_achieved == 1.0


def test_certify_identity_empty_above_threshold():
    for n in (2, 3, 4, 6):
        report = certify_dispersing(MatrixUnitary(np.eye(2**n, dtype=complex)), beta=0.5)
        expected = 0 if 1.0 < 0.5 * 2 ** (n / 2) - 1e-12 else 2**n
        assert len(report.achieving_set) == expected


def test_certify_cyclic_qft_full():
    report = certify_dispersing(qft_cyclic(32).as_action(), beta=1.0)
    assert len(report.achieving_set) == 32
    assert report.alpha_achieved == 1.0


def test_certify_rejects_bad_beta():
    with pytest.raises(InvalidConfigError):
        certify_dispersing(hadamard_all(2), beta=0.0)


def test_pseudo_search_abelian_block_is_exact():
    fourier = qft_cyclic(8)
    report = pseudo_search(fourier, ("chi3", 1), samples=50, rng=stream(5))
    np.testing.assert_allclose(report.l1_values, np.sqrt(8), atol=1e-10)


@pytest.mark.parametrize("name", ["s3", "d4", "q8"])
def test_pseudo_search_two_dim_blocks(name):
    group = builtin_group(name)
    fourier = group_fourier(group)
    label = [b for b in fourier.block_labels() if len(fourier.rows_for_block(*b)) == 2][0]
    report = pseudo_search(fourier, label, samples=2000, rng=stream(6))
    bound = np.sqrt(group.order / 2.0)
    assert report.mean_value >= bound - 3 * report.standard_error()
    assert report.best_value >= bound
    # Unit vectors cannot beat the Cauchy-Schwarz cap.
    assert np.all(report.l1_values <= np.sqrt(group.order) + 1e-9)


def test_pseudo_search_requires_rng():
    with pytest.raises(InvalidConfigError):
        pseudo_search(qft_cyclic(4), ("chi1", 1), samples=10, rng=None)


def test_pseudo_alpha_reporting():
    from oraclelab.dispersion import pseudo_alpha

    alpha, exact_register = pseudo_alpha(group_fourier(builtin_group("q8")))
    # 6 output labels over 8 elements: log2(6)/3, and 8 is a power of two.
    assert abs(alpha - np.log2(6) / 3) <= 1e-12
    assert exact_register
    alpha_s3, exact_s3 = pseudo_alpha(group_fourier(builtin_group("s3")))
    assert not exact_s3  # order 6 does not fill a qubit register
    assert alpha_s3 >= 0.5  # at least half the register, any group


def test_fourth_moment_sign_variable():
    lhs, rhs, ok = fourth_moment_check([1.0, -1.0, 1.0, -1.0])
    assert ok and abs(lhs - 1.0) <= 1e-15 and abs(rhs - 1.0) <= 1e-15


def test_fourth_moment_hadamard_row_equality():
    n = 5
    col = np.zeros(2**n, dtype=complex)
    col[7] = 1.0
    row = np.abs(fwht_normalized(col))
    lhs, rhs, ok = fourth_moment_check(row)
    assert ok
    assert abs(lhs - 2 ** (-n / 2)) <= 1e-12
    assert abs(rhs - 2 ** (-n / 2)) <= 1e-12


def test_fourth_moment_gaussian():
    rng = stream(14)
    y = rng.standard_normal(10_000)
    lhs, rhs, ok = fourth_moment_check(y)
    assert ok
    assert abs(lhs - np.sqrt(2 / np.pi)) <= 0.03
    assert abs(rhs - 1 / np.sqrt(3)) <= 0.03


def test_fourth_moment_rejects_zero():
    with pytest.raises(DegenerateInputError):
        fourth_moment_check(np.zeros(5))


def test_collision_extremes():
    assert collision(PureState.basis(4, 3)) == 1.0
    assert abs(collision(PureState.uniform(4)) - 2.0**-4) <= 1e-12


def test_collision_after_hadamard_and_swap():
    state = PureState.basis(2, 0)
    state = PureState(2, fwht_normalized(state.amplitudes))
    state = apply_gate(state, TwoQubitGate(SWAP_2Q), 0, 1)
    assert abs(collision(state) - 0.25) <= 1e-12


def test_l1_collision_inequality():
    # L1^2 * collision >= 1 for every normalized state.
    rng = stream(15)
    for _ in range(200):
        n = int(rng.integers(1, 6))
        amps = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
        amps /= np.linalg.norm(amps)
        state = PureState(n, amps)
        l1 = float(np.sum(np.abs(amps)))
        q = collision(state)
        assert q >= 2.0**-n - 1e-12
        assert l1 * l1 * q >= 1.0 - 1e-9
