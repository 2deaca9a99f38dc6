import json

import numpy as np
import pytest

from oraclelab.errors import InvalidConfigError, InvalidGroupDataError
from oraclelab.simcore import (
    GroupSpec,
    builtin_group,
    cyclic_group,
    dump_matrix_csv,
    fwht_normalized,
    group_fourier,
    qft_cyclic,
    stream,
    xor_group,
)


@pytest.mark.parametrize("name", ["s3", "d4", "q8"])
def test_builtin_groups_validate(name):
    group = builtin_group(name)
    assert sum(rep.dim**2 for rep in group.irreps) == group.order
    fourier = group_fourier(group)
    defect = np.abs(
        fourier.entries.conj().T @ fourier.entries - np.eye(group.order)
    ).max()
    assert defect <= 1e-10
    assert len(fourier.row_index) == group.order


def test_z2_fourier_is_hadamard():
    fourier = qft_cyclic(2)
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    np.testing.assert_allclose(fourier.entries, h, atol=1e-15)


def test_cyclic_entry_formula():
    fourier = qft_cyclic(4)
    # entry(1, 3) = omega^3 / 2 = -i/2
    assert abs(fourier.entries[1, 3] - (-0.5j)) <= 1e-12
    for n in (3, 5, 8):
        f = qft_cyclic(n)
        omega = np.exp(2j * np.pi / n)
        for j in (0, 1, n - 1):
            for g in (0, 1, n - 1):
                assert abs(f.entries[j, g] - omega ** (j * g) / np.sqrt(n)) <= 1e-12


def test_xor_group_fourier_matches_hadamard_transform():
    fourier = group_fourier(xor_group(3))
    rng = stream(12)
    vec = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    np.testing.assert_allclose(
        fourier.entries @ vec, fwht_normalized(vec), atol=1e-12
    )


@pytest.mark.parametrize("name", ["s3", "d4", "q8"])
def test_plancherel_on_random_vectors(name):
    fourier = group_fourier(builtin_group(name))
    rng = stream(13)
    for _ in range(100):
        vec = rng.standard_normal(fourier.group.order) + 1j * rng.standard_normal(
            fourier.group.order
        )
        assert abs(
            np.linalg.norm(fourier.entries @ vec) - np.linalg.norm(vec)
        ) <= 1e-10 * np.linalg.norm(vec)


def test_group_json_round_trip(tmp_path):
    group = builtin_group("s3")
    path = tmp_path / "s3.json"
    with open(path, "w") as fh:
        json.dump(group.to_json_dict(), fh)
    with open(path) as fh:
        reloaded = GroupSpec.from_json_dict(json.load(fh))
    assert reloaded.order == group.order
    np.testing.assert_array_equal(reloaded.mult_table, group.mult_table)
    for a, b in zip(reloaded.irreps, group.irreps):
        assert a.label == b.label
        np.testing.assert_allclose(a.matrices, b.matrices)


def test_bad_group_data_rejected():
    group = builtin_group("s3")
    bad_table = np.array(group.mult_table)
    bad_table[0, 1] = bad_table[0, 0]
    with pytest.raises(InvalidGroupDataError):
        GroupSpec("broken", group.order, bad_table, group.irreps)
    # Wrong irrep dimension tally.
    with pytest.raises(InvalidGroupDataError):
        GroupSpec("broken", group.order, group.mult_table, group.irreps[:2])


def test_fourier_block_lookup():
    fourier = group_fourier(builtin_group("q8"))
    blocks = fourier.block_labels()
    assert ("spinor", 1) in blocks and ("spinor", 2) in blocks
    rows = fourier.rows_for_block("spinor", 1)
    assert len(rows) == 2
    assert fourier.row_index[rows[0]] == ("spinor", 1, 1)


def test_as_action_requires_power_of_two():
    with pytest.raises(InvalidConfigError):
        group_fourier(builtin_group("s3")).as_action()
    action = group_fourier(builtin_group("d4")).as_action()
    assert action.n_qubits == 3


def test_matrix_csv_dump(tmp_path):
    fourier = qft_cyclic(2)
    path = tmp_path / "f.csv"
    dump_matrix_csv(fourier.entries, path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 2
    cell = lines[0].split(",")[0]
    assert cell.endswith("j") and "0.70710678118654" in cell


def test_cyclic_group_requires_order_two():
    with pytest.raises(InvalidConfigError):
        cyclic_group(1)
