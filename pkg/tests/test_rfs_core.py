import numpy as np
import pytest
from scipy import stats

from oraclelab.errors import DepthError, InvalidConfigError, ProtocolError
from oraclelab.rfs import (
    FAIL,
    load_query_log,
    load_rfs_spec,
    make_rfs_spec,
    oracle_query,
    save_query_log,
    secret_at,
)
from oraclelab.simcore import stream


def test_secret_deterministic():
    spec = make_rfs_spec(depth=3, n_symbol_bits=3, master_seed=9, alpha_n=2)
    for path in [(), (1,), (5, 2)]:
        assert secret_at(spec, path) == secret_at(spec, path)


def test_secret_depth_guard():
    spec = make_rfs_spec(depth=2, n_symbol_bits=2, master_seed=1)
    with pytest.raises(DepthError):
        secret_at(spec, (0, 1))


def test_root_secret_uniform_over_seeds():
    from dataclasses import replace

    base = make_rfs_spec(depth=1, n_symbol_bits=4, master_seed=0, alpha_n=4)
    counts = np.zeros(16, dtype=int)
    for seed in range(10_000):
        counts[secret_at(replace(base, master_seed=seed), ())] += 1
    _chi2, p_value = stats.chisquare(counts)
    assert p_value > 0.05


def test_sibling_secrets_collide_at_uniform_rate():
    from dataclasses import replace

    base = make_rfs_spec(depth=2, n_symbol_bits=4, master_seed=0, alpha_n=4)
    agree = 0
    trials = 10_000
    for seed in range(trials):
        spec = replace(base, master_seed=seed)
        agree += secret_at(spec, (0,)) == secret_at(spec, (1,))
    rate = agree / trials
    expected = 1 / 16
    assert abs(rate - expected) <= 4 * np.sqrt(expected / trials)


def test_oracle_semantics_exhaustive_random():
    spec = make_rfs_spec(depth=3, n_symbol_bits=3, master_seed=4, alpha_n=3)
    rng = stream(70)
    for _ in range(10_000):
        k = int(rng.integers(0, spec.depth))
        path = tuple(int(rng.integers(8)) for _ in range(k))
        guess = int(rng.integers(spec.n_labels))
        result = oracle_query(spec, path, guess=guess)
        assert (result == FAIL) == (guess != secret_at(spec, path))
        if result != FAIL:
            if k == 0:
                assert result == spec.b_root
            else:
                assert result == spec.oracle.f(secret_at(spec, path[:-1]), path[-1])


def test_leaf_query_needs_no_guess():
    spec = make_rfs_spec(depth=2, n_symbol_bits=2, master_seed=4)
    value = oracle_query(spec, (3, 1))
    assert value == spec.oracle.f(secret_at(spec, (3,)), 1)


def test_internal_query_matches_secret_recomputation():
    spec = make_rfs_spec(depth=2, n_symbol_bits=3, master_seed=12, alpha_n=2)
    path = (5,)
    result = oracle_query(spec, path, guess=secret_at(spec, path))
    assert result == spec.oracle.f(secret_at(spec, ()), 5)


def test_protocol_errors_are_not_fail():
    spec = make_rfs_spec(depth=2, n_symbol_bits=2, master_seed=4)
    with pytest.raises(ProtocolError):
        oracle_query(spec, (0, 1), guess=0)  # leaves take no guess
    with pytest.raises(ProtocolError):
        oracle_query(spec, (0,))  # internal nodes need one
    with pytest.raises(ProtocolError):
        oracle_query(spec, (0, 1, 1))  # deeper than the tree
    with pytest.raises(ProtocolError):
        oracle_query(spec, (9,), guess=0)  # symbol out of range


def test_query_log_round_trip(tmp_path):
    spec = make_rfs_spec(depth=2, n_symbol_bits=2, master_seed=4)
    log = []
    oracle_query(spec, (), guess=0, log=log)
    oracle_query(spec, (1, 2), log=log)
    path = tmp_path / "log.jsonl"
    save_query_log(log, path)
    loaded = load_query_log(path)
    assert loaded == log
    assert [rec.index for rec in loaded] == [0, 1]


def test_spec_file_round_trip(tmp_path):
    spec = make_rfs_spec(depth=2, n_symbol_bits=4, master_seed=77, alpha_n=3)
    path = tmp_path / "spec.json"
    spec.save(path)
    reloaded = load_rfs_spec(path)
    assert reloaded.depth == spec.depth
    assert reloaded.b_root == spec.b_root
    np.testing.assert_array_equal(reloaded.oracle.f_bits, spec.oracle.f_bits)
    assert secret_at(reloaded, (3,)) == secret_at(spec, (3,))


def test_random_circuit_spec_round_trip(tmp_path):
    spec = make_rfs_spec(
        depth=1,
        n_symbol_bits=3,
        master_seed=5,
        kind="random-circuit",
        alpha_n=2,
        circuit_length=40,
        circuit_seed=13,
    )
    path = tmp_path / "spec.json"
    spec.save(path)
    reloaded = load_rfs_spec(path)
    np.testing.assert_array_equal(reloaded.oracle.f_bits, spec.oracle.f_bits)


def test_bad_spec_kind():
    with pytest.raises(InvalidConfigError):
        make_rfs_spec(depth=1, n_symbol_bits=2, master_seed=0, kind="nope")
