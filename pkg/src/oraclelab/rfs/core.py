"""Recursive oracle identification instances: seeded secret trees and queries.

An instance is a depth-``l`` tree whose nodes at depth ``k < l`` carry hidden
labels.  Querying a node requires presenting its label; a correct guess
returns the parent's data bit for that branch, a wrong guess returns FAIL.
Leaves return data bits unconditionally.  The root's correct guess returns
the answer bit of the whole instance.

Secrets are not stored: the label of the node at ``path`` is derived as
``A[hash(master_seed, path) mod |A|]`` with a fixed 64-bit mixing chain, so
an exponential tree replays from a single seed while distinct nodes get
independent-looking labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import DepthError, InvalidConfigError, ProtocolError
from ..oracle import SingleLevelOracle, build_oracle
from ..simcore import (
    CircuitUnitary,
    MatrixUnitary,
    action_matrix,
    hadamard_all,
    mix64,
    run_random_circuit,
)

FAIL = "FAIL"

_SECRET_TAG = 0x5EC4E7
_ANSWER_TAG = 0xA05BEE


@dataclass(frozen=True)
class QueryRecord:
    """One oracle call: the path, the optional guess, and the answer."""

    path: tuple[int, ...]
    guess: int | None
    result: int | str
    index: int

    def to_json_dict(self) -> dict:
        return {
            "index": self.index,
            "path": list(self.path),
            "guess": self.guess,
            "result": self.result,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "QueryRecord":
        return cls(
            path=tuple(int(x) for x in data["path"]),
            guess=None if data["guess"] is None else int(data["guess"]),
            result=data["result"] if data["result"] == FAIL else int(data["result"]),
            index=int(data["index"]),
        )


def save_query_log(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json_dict()) + "\n")


def load_query_log(path) -> list[QueryRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(QueryRecord.from_json_dict(json.loads(line)))
    return records


@dataclass(frozen=True)
class RecursiveOracleSpec:
    """A seeded depth-``l`` instance over a compiled single-level family."""

    depth: int
    n_symbol_bits: int
    oracle: SingleLevelOracle = field(repr=False)
    master_seed: int
    b_root: int
    descriptor: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.depth < 1:
            raise InvalidConfigError("depth must be at least 1")
        if self.b_root not in (0, 1):
            raise InvalidConfigError("answer bit must be 0 or 1")
        if self.oracle.n_qubits != self.n_symbol_bits:
            raise InvalidConfigError("oracle symbol width mismatch")

    @property
    def n_labels(self) -> int:
        return self.oracle.n_labels

    @property
    def alpha_n(self) -> int:
        return int(np.log2(self.n_labels))

    def to_json_dict(self) -> dict:
        return {
            "l": self.depth,
            "n": self.n_symbol_bits,
            "alpha_n": self.alpha_n,
            "master_seed": self.master_seed,
            "b_root": self.b_root,
            "oracle_ref": self.descriptor,
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh)


def derive_answer_bit(master_seed: int) -> int:
    return mix64(master_seed ^ _ANSWER_TAG) & 1


def secret_at(spec: RecursiveOracleSpec, path) -> int:
    """Label index of the node at ``path`` (leaves carry no label)."""
    path = tuple(int(x) for x in path)
    if len(path) >= spec.depth:
        raise DepthError(f"path of length {len(path)} has no secret at depth {spec.depth}")
    for sym in path:
        if not 0 <= sym < 2**spec.n_symbol_bits:
            raise ProtocolError(f"symbol {sym} out of range")
    h = mix64(spec.master_seed ^ _SECRET_TAG)
    for sym in path:
        h = mix64(h ^ mix64(sym + 0x9E3779B97F4A7C15))
    return int(h % spec.n_labels)


def oracle_query(
    spec: RecursiveOracleSpec,
    path,
    guess: int | None = None,
    log: list | None = None,
):
    """One oracle call with the three-case tree semantics.

    * empty path + guess: the root answer bit if the guess is the root's
      label, FAIL otherwise;
    * internal path + guess: the parent's data bit for the branch if the
      guess matches the node's label, FAIL otherwise;
    * full-depth path, no guess: the leaf's data bit.

    Malformed arity raises :class:`ProtocolError`, which is distinct from
    the in-band FAIL answer.  Every call is appended to ``log`` when given.
    """
    path = tuple(int(x) for x in path)
    k = len(path)
    if k > spec.depth:
        raise ProtocolError(f"path of length {k} exceeds depth {spec.depth}")
    for sym in path:
        if not 0 <= sym < 2**spec.n_symbol_bits:
            raise ProtocolError(f"symbol {sym} out of range")
    if k == spec.depth:
        if guess is not None:
            raise ProtocolError("leaf queries take no guess")
        result: int | str = spec.oracle.f(secret_at(spec, path[:-1]), path[-1])
    else:
        if guess is None:
            raise ProtocolError("non-leaf queries require a guess")
        if not 0 <= guess < spec.n_labels:
            raise ProtocolError(f"guess {guess} out of range")
        if guess != secret_at(spec, path):
            result = FAIL
        elif k == 0:
            result = spec.b_root
        else:
            result = spec.oracle.f(secret_at(spec, path[:-1]), path[-1])
    if log is not None:
        log.append(QueryRecord(path, guess, result, index=len(log)))
    return result


def make_rfs_spec(
    depth: int,
    n_symbol_bits: int,
    master_seed: int,
    kind: str = "hadamard",
    alpha_n: int | None = None,
    circuit_length: int | None = None,
    circuit_seed: int | None = None,
) -> RecursiveOracleSpec:
    """Build a seeded instance whose single-level family comes from a unitary.

    ``kind`` selects the compiled unitary: ``hadamard`` (labels are the first
    ``2^alpha_n`` basis indices; every label's success is exactly 1) or
    ``random-circuit`` (dense matrix of a seeded circuit).  ``alpha_n``
    defaults to ``ceil(n/2)`` label bits.
    """
    if alpha_n is None:
        alpha_n = (n_symbol_bits + 1) // 2
    if not 1 <= alpha_n <= n_symbol_bits:
        raise InvalidConfigError("alpha_n must lie in [1, n]")
    labels = range(2**alpha_n)
    if kind == "hadamard":
        unitary = hadamard_all(n_symbol_bits)
        descriptor = {"kind": "hadamard", "n": n_symbol_bits, "alpha_n": alpha_n}
    elif kind == "random-circuit":
        if circuit_length is None or circuit_seed is None:
            raise InvalidConfigError("random-circuit kind needs circuit_length and circuit_seed")
        circ = run_random_circuit(n_symbol_bits, circuit_length, circuit_seed)
        unitary = MatrixUnitary(action_matrix(CircuitUnitary(circ)))
        descriptor = {
            "kind": "random-circuit",
            "n": n_symbol_bits,
            "alpha_n": alpha_n,
            "t": circuit_length,
            "circuit_seed": circuit_seed,
        }
    else:
        raise InvalidConfigError(f"unknown oracle kind {kind!r}")
    oracle = build_oracle(unitary, labels)
    return RecursiveOracleSpec(
        depth=depth,
        n_symbol_bits=n_symbol_bits,
        oracle=oracle,
        master_seed=master_seed,
        b_root=derive_answer_bit(master_seed),
        descriptor=descriptor,
    )


def unitary_for_spec(spec: RecursiveOracleSpec):
    """Rebuild the identification unitary recorded in the spec descriptor."""
    desc = spec.descriptor
    kind = desc.get("kind")
    if kind == "hadamard":
        return hadamard_all(spec.n_symbol_bits)
    if kind == "random-circuit":
        circ = run_random_circuit(spec.n_symbol_bits, desc["t"], desc["circuit_seed"])
        return MatrixUnitary(action_matrix(CircuitUnitary(circ)))
    raise InvalidConfigError(f"descriptor carries no rebuildable unitary: {desc!r}")


def load_rfs_spec(path) -> RecursiveOracleSpec:
    """Reload a spec file; the oracle is recompiled from its descriptor."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    desc = data["oracle_ref"]
    spec = make_rfs_spec(
        depth=int(data["l"]),
        n_symbol_bits=int(data["n"]),
        master_seed=int(data["master_seed"]),
        kind=desc["kind"],
        alpha_n=int(data["alpha_n"]),
        circuit_length=desc.get("t"),
        circuit_seed=desc.get("circuit_seed"),
    )
    if spec.b_root != int(data["b_root"]):
        raise InvalidConfigError("answer bit in file contradicts the seed derivation")
    return spec
