"""The single-level oracle identification game.

A hidden label ``a`` is presented through a binary oracle ``f(a, .)``.  The
compiler turns row ``a`` of a unitary (optionally contracted against an
ancilla vector inside the label's measurement block) into a sign pattern via
:mod:`oraclelab.signs`; querying the oracle once in superposition prepares
the signed uniform state, and applying the unitary concentrates probability
on ``a``.  The compiled table guarantees a success probability of at least
``(2 beta / pi)^2`` where ``beta`` is the row's L1 norm over ``2^(n/2)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfigError, LabelError
from .signs import best_phase_signs
from .simcore import FourierMatrix, PureState, adjoint_rows

TWO_OVER_PI = 2.0 / np.pi


@dataclass(frozen=True)
class LabelSpec:
    """One identifiable label: its id, measurement rows, optional ancilla."""

    ident: int | tuple[str, int]
    rows: tuple[int, ...]
    psi: np.ndarray | None = None


@dataclass(frozen=True)
class SingleLevelOracle:
    """Compiled oracle family: one bit-vector of ``f(a, x)`` per label.

    ``hidden_index`` marks the instance's secret label (an index into
    ``labels``).  ``betas[k]`` is the achieved L1 over ``2^(n/2)`` for label
    ``k`` and ``predicted_success[k] = (2 betas[k] / pi)^2``.
    """

    n_qubits: int
    m_bits: int
    labels: tuple[LabelSpec, ...]
    f_bits: np.ndarray = field(repr=False)  # (len(labels), 2^n) uint8
    betas: np.ndarray = field(repr=False)
    predicted_success: np.ndarray = field(repr=False)
    hidden_index: int = 0
    seed: int | None = None

    def __post_init__(self):
        if len(self.labels) == 0:
            raise InvalidConfigError("oracle needs at least one label")
        if self.f_bits.shape != (len(self.labels), 2**self.n_qubits):
            raise InvalidConfigError("f_bits shape mismatch")
        if not 0 <= self.hidden_index < len(self.labels):
            raise LabelError(f"hidden index {self.hidden_index} out of range")
        if np.any(self.predicted_success <= 0) or np.any(self.predicted_success > 1):
            raise InvalidConfigError("predicted success must lie in (0, 1]")

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    def f(self, label_index: int, x: int) -> int:
        return int(self.f_bits[label_index, x])

    def label_index(self, ident) -> int:
        for k, spec in enumerate(self.labels):
            if spec.ident == ident:
                return k
        raise LabelError(f"unknown label {ident!r}")

    def to_json_dict(self) -> dict:
        return {
            "n": self.n_qubits,
            "m": self.m_bits,
            "labels": [list(s.ident) if isinstance(s.ident, tuple) else s.ident for s in self.labels],
            # Bit order: x ascending, least-significant bit first within each byte.
            "f_bits": [
                np.packbits(row, bitorder="little").tobytes().hex()
                for row in self.f_bits
            ],
            "beta": [float(b) for b in self.betas],
            "seed": self.seed,
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh)


def load_oracle(path) -> SingleLevelOracle:
    """Load a compiled oracle instance from its JSON file."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    n = int(data["n"])
    dim = 2**n
    rows = []
    for hexrow in data["f_bits"]:
        packed = np.frombuffer(bytes.fromhex(hexrow), dtype=np.uint8)
        rows.append(np.unpackbits(packed, bitorder="little")[:dim])
    labels = tuple(
        LabelSpec(tuple(ident) if isinstance(ident, list) else int(ident), rows=())
        for ident in data["labels"]
    )
    betas = np.array(data["beta"], dtype=float)
    predicted = (TWO_OVER_PI * betas) ** 2
    return SingleLevelOracle(
        n_qubits=n,
        m_bits=int(data["m"]),
        labels=labels,
        f_bits=np.array(rows, dtype=np.uint8),
        betas=betas,
        predicted_success=predicted,
        seed=data.get("seed"),
    )


@dataclass(frozen=True)
class IdentificationOutcome:
    """Exact success probability plus optional shot statistics."""

    success_prob: float
    sampled_hits: int
    shots: int

    def __post_init__(self):
        if not -1e-12 <= self.success_prob <= 1 + 1e-12:
            raise ValueError("success probability out of range")
        if self.sampled_hits > self.shots:
            raise ValueError("more hits than shots")


def _label_row_vector(unitary, spec: LabelSpec, n_qubits: int) -> np.ndarray:
    """The compiled row ``c_x = <a| <psi| U |x>`` for one label."""
    if isinstance(unitary, FourierMatrix):
        block = unitary.entries[list(spec.rows), :]
        psi = spec.psi if spec.psi is not None else np.ones(1, dtype=complex)
        return psi.conj() @ block
    (row,) = spec.rows
    return adjoint_rows(unitary, row).conj()


def build_oracle(
    unitary,
    labels,
    psi: dict | None = None,
    hidden_index: int = 0,
    seed: int | None = None,
) -> SingleLevelOracle:
    """Compile an oracle family from a unitary and a list of labels.

    ``unitary`` is either an action on n qubits (labels are basis indices,
    all n output bits are measured) or a :class:`FourierMatrix` whose order
    is a power of two (labels are ``(irrep, i)`` blocks and ``psi`` may map a
    label to ancilla coefficients over its block; blocks of dimension one
    default to the trivial ancilla).

    For each label the compiled bits are ``f(a, x) = (1 - theta_x) / 2``
    where ``theta`` is the sign pattern maximizing the retained L1 mass of
    the label's row.  The global sign of ``theta`` is not fixed by the
    construction; either choice satisfies the success bound.
    """
    labels = list(labels)
    if not labels:
        raise InvalidConfigError("empty label list")

    if isinstance(unitary, FourierMatrix):
        order = unitary.group.order
        if order & (order - 1):
            raise InvalidConfigError("group order must be a power of two")
        n = int(np.log2(order))
        m = max(1, int(np.ceil(np.log2(len(unitary.block_labels())))))
        specs = []
        for ident in labels:
            rows = tuple(unitary.rows_for_block(*ident))
            if not rows:
                raise LabelError(f"no block {ident} in Fourier matrix")
            vec = None
            if psi and ident in psi:
                vec = np.asarray(psi[ident], dtype=complex)
                vec = vec / np.linalg.norm(vec)
            elif len(rows) == 1:
                vec = np.ones(1, dtype=complex)
            else:
                raise InvalidConfigError(
                    f"label {ident} has block dimension {len(rows)}; supply psi"
                )
            specs.append(LabelSpec(tuple(ident), rows, vec))
    else:
        n = unitary.n_qubits
        m = n
        specs = [LabelSpec(int(a), (int(a),)) for a in labels]

    dim = 2**n
    f_bits = np.zeros((len(specs), dim), dtype=np.uint8)
    betas = np.zeros(len(specs))
    for k, spec in enumerate(specs):
        c = _label_row_vector(unitary, spec, n)
        sol = best_phase_signs(c)
        theta = np.array(sol.theta)
        f_bits[k] = ((1 - theta) // 2).astype(np.uint8)
        betas[k] = sol.l1 / 2 ** (n / 2)
    predicted = (TWO_OVER_PI * betas) ** 2
    return SingleLevelOracle(
        n_qubits=n,
        m_bits=m,
        labels=tuple(specs),
        f_bits=f_bits,
        betas=betas,
        predicted_success=predicted,
        hidden_index=hidden_index,
        seed=seed,
    )


def prepare_phi(oracle: SingleLevelOracle, label_index: int) -> PureState:
    """The signed uniform state with amplitudes ``+-2^(-n/2)`` matching ``f``.

    One oracle sweep in superposition; query accounting charges it as a
    single query.
    """
    if not 0 <= label_index < oracle.n_labels:
        raise LabelError(f"label index {label_index} out of range")
    dim = 2**oracle.n_qubits
    signs = 1.0 - 2.0 * oracle.f_bits[label_index].astype(float)
    return PureState(oracle.n_qubits, signs / np.sqrt(dim))


def outcome_distribution(unitary, oracle: SingleLevelOracle, label_index: int) -> np.ndarray:
    """Probabilities of every label's measurement block on ``U |phi_a>``."""
    phi = prepare_phi(oracle, label_index)
    if isinstance(unitary, FourierMatrix):
        out = unitary.entries @ phi.amplitudes
    else:
        out = unitary.apply(phi.amplitudes)
    probs = np.abs(out) ** 2
    return np.array([float(np.sum(probs[list(spec.rows)])) for spec in oracle.labels])


def identify(
    unitary,
    oracle: SingleLevelOracle,
    label_index: int,
    shots: int = 0,
    rng: np.random.Generator | None = None,
) -> IdentificationOutcome:
    """Run the identification measurement on the compiled state for a label.

    The success probability is computed exactly from the state vector: the
    measurement projects onto the label's block of output rows (a single row
    when all n bits are measured).  With ``shots > 0`` the exact probability
    is also sampled binomially.
    """
    if not 0 <= label_index < oracle.n_labels:
        raise LabelError(f"label index {label_index} out of range")
    phi = prepare_phi(oracle, label_index)
    spec = oracle.labels[label_index]
    if isinstance(unitary, FourierMatrix):
        out = unitary.entries @ phi.amplitudes
    else:
        out = unitary.apply(phi.amplitudes)
    success = float(np.sum(np.abs(out[list(spec.rows)]) ** 2))
    success = min(success, 1.0)
    hits = 0
    if shots:
        if rng is None:
            raise InvalidConfigError("shot sampling requires an rng stream")
        hits = int(rng.binomial(shots, success))
    return IdentificationOutcome(success, hits, shots)


def classical_guess_bound(q: int, alpha_n: float) -> float:
    """Upper bound ``2^(q - alpha_n)`` on classical success after ``q`` bits."""
    if q < 0:
        raise InvalidConfigError("q must be nonnegative")
    return float(2.0 ** (q - alpha_n))


def simulate_bisection_strategy(
    alpha_n: int, q: int, trials: int, rng: np.random.Generator
) -> float:
    """Empirical win rate of the best bit-per-query classical strategy.

    The hidden label is uniform over ``2^alpha_n`` candidates; each query
    answers one bit that halves the candidate set, and the final guess is
    uniform over what remains.  Returns the fraction of wins over ``trials``.
    """
    n_labels = 2**alpha_n
    remaining = max(1, n_labels >> min(q, alpha_n))
    wins = rng.random(trials) < (1.0 / remaining)
    return float(np.mean(wins))
