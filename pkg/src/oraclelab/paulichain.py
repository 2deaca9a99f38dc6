"""The Pauli-string Markov chain driven by random two-qubit gates.

Averaging the squared Pauli coefficients of a state over a random two-qubit
gate on sites ``(i, j)`` acts as a classical Markov step on the string
``p in {0,1,2,3}^n``: a pair ``(0, 0)`` is left alone, any other pair is
replaced by a uniform draw from the 15 nonzero pairs.  Since the update law
only depends on how many of the two chosen sites are nonzero, the weight
(count of nonzero sites) is itself a Markov chain on ``{1, .., n}``; its
stationary law is ``pi(w) ~ C(n, w) 3^w`` and its spectrum is computable
exactly at any ``n``.

Site codes: 0 is the identity, 1 the phase flip, 2 the bit flip, 3 their
product (so codes 0 and 1 are the diagonal Paulis).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidConfigError, SizeError
from .simcore import PureState, sample_haar_two_qubit

PAULI_1Q = (
    np.eye(2, dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),  # code 1: sigma_z
    np.array([[0, 1], [1, 0]], dtype=complex),  # code 2: sigma_x
    np.array([[0, -1j], [1j, 0]], dtype=complex),  # code 3: sigma_y
)

NONZERO_PAIRS = np.array(
    [(a, b) for a in range(4) for b in range(4) if (a, b) != (0, 0)], dtype=np.uint8
)

MAX_WEIGHT_CHAIN_N = 64
RATIONAL_ASSEMBLY_MAX_N = 8
MAX_FULL_CHAIN_N = 4


@dataclass(frozen=True)
class PauliString:
    """A length-``n`` string of single-site codes in {0, 1, 2, 3}."""

    codes: tuple[int, ...]

    def __post_init__(self):
        if any(c not in (0, 1, 2, 3) for c in self.codes):
            raise InvalidConfigError("site codes must be 0..3")

    @property
    def n_sites(self) -> int:
        return len(self.codes)

    @property
    def weight(self) -> int:
        return sum(1 for c in self.codes if c != 0)

    def matrix(self) -> np.ndarray:
        out = np.array([[1.0 + 0j]])
        # Site k is bit k of the basis index, so it is the last kron factor.
        for code in reversed(self.codes):
            out = np.kron(out, PAULI_1Q[code])
        return out


def chain_step(p: PauliString, rng: np.random.Generator) -> PauliString:
    """One update: pick a random distinct pair of sites and rerandomize it."""
    n = p.n_sites
    if n < 2:
        raise InvalidConfigError("chain needs at least 2 sites")
    i = int(rng.integers(n))
    j = int(rng.integers(n - 1))
    if j >= i:
        j += 1
    codes = list(p.codes)
    if codes[i] == 0 and codes[j] == 0:
        return p
    a, b = NONZERO_PAIRS[int(rng.integers(15))]
    codes[i], codes[j] = int(a), int(b)
    return PauliString(tuple(codes))


def walk_ensemble(
    n_sites: int,
    steps: int,
    walkers: int,
    rng: np.random.Generator,
    start: tuple[int, ...] | None = None,
) -> np.ndarray:
    """Evolve many independent walkers; returns final codes, shape (walkers, n)."""
    if n_sites < 2:
        raise InvalidConfigError("chain needs at least 2 sites")
    if start is None:
        start = (1,) + (0,) * (n_sites - 1)
    codes = np.tile(np.array(start, dtype=np.uint8), (walkers, 1))
    pair_list = np.array(list(itertools.combinations(range(n_sites), 2)))
    for _ in range(steps):
        pick = rng.integers(len(pair_list), size=walkers)
        i = pair_list[pick, 0]
        j = pair_list[pick, 1]
        rows = np.arange(walkers)
        vi = codes[rows, i]
        vj = codes[rows, j]
        active = (vi != 0) | (vj != 0)
        draw = NONZERO_PAIRS[rng.integers(15, size=walkers)]
        codes[rows[active], i[active]] = draw[active, 0]
        codes[rows[active], j[active]] = draw[active, 1]
    return codes


@dataclass(frozen=True)
class GammaDistribution:
    """Probability masses of squared Pauli coefficients after ``t`` steps."""

    n_sites: int
    t: int
    masses: np.ndarray = field(repr=False)  # indexed like all_strings(n)

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float)
        if masses.shape != (4**self.n_sites,):
            raise InvalidConfigError("need one mass per Pauli string")
        if masses.min() < -1e-12 or abs(masses.sum() - 1.0) > 1e-9:
            raise InvalidConfigError("masses must be a probability distribution")

    def mass(self, codes) -> float:
        index = 0
        for c in codes:
            index = index * 4 + int(c)
        return float(self.masses[index])

    @classmethod
    def from_state(cls, state: PureState, t: int) -> "GammaDistribution":
        return cls(state.n_qubits, t, gamma_squared(state))

    @classmethod
    def initial(cls, n: int, a: int = 0) -> "GammaDistribution":
        return cls(n, 0, initial_gamma_squared(n, a))

    def stepped(self, chain_matrix: np.ndarray, steps: int = 1) -> "GammaDistribution":
        masses = self.masses
        for _ in range(steps):
            masses = masses @ chain_matrix
        return GammaDistribution(self.n_sites, self.t + steps, masses)


@dataclass(frozen=True)
class WeightChain:
    """Weight-lumped transition matrix on ``{1, .., n}`` with its stationary law."""

    n_sites: int
    transition: np.ndarray = field(repr=False)
    stationary: np.ndarray = field(repr=False)

    def states(self) -> np.ndarray:
        return np.arange(1, self.n_sites + 1)

    def stationary_json(self) -> dict:
        """Weight-to-mass map in the documented dump layout."""
        return {str(w): float(p) for w, p in zip(self.states(), self.stationary)}


def lumped_matrix_rational(n: int) -> list[list[Fraction]]:
    """Exact rational assembly of the weight chain (small ``n`` only)."""
    if n < 2:
        raise InvalidConfigError("need n >= 2")
    if n > RATIONAL_ASSEMBLY_MAX_N:
        raise SizeError(f"rational assembly capped at n={RATIONAL_ASSEMBLY_MAX_N}")
    pairs = Fraction(n * (n - 1), 2)
    rows = []
    for w in range(1, n + 1):
        row = [Fraction(0)] * n
        both_zero = Fraction((n - w) * (n - w - 1), 2) / pairs
        one_nonzero = Fraction(w * (n - w)) / pairs
        both_nonzero = Fraction(w * (w - 1), 2) / pairs
        row[w - 1] += both_zero
        # v nonzero sites among the pair are replaced by a new pair of
        # weight u: 6 of 15 outcomes have u = 1, 9 of 15 have u = 2.
        for v, pick in ((1, one_nonzero), (2, both_nonzero)):
            for u, count in ((1, Fraction(6, 15)), (2, Fraction(9, 15))):
                w_new = w - v + u
                if 1 <= w_new <= n:
                    row[w_new - 1] += pick * count
        rows.append(row)
    return rows


def lumped_matrix(n: int) -> WeightChain:
    """The weight chain; rational assembly below n=9, floating point above."""
    if n < 2:
        raise InvalidConfigError("need n >= 2")
    if n > MAX_WEIGHT_CHAIN_N:
        raise SizeError(f"weight chain capped at n={MAX_WEIGHT_CHAIN_N}")
    if n <= RATIONAL_ASSEMBLY_MAX_N:
        trans = np.array(
            [[float(q) for q in row] for row in lumped_matrix_rational(n)]
        )
    else:
        pairs = n * (n - 1) / 2.0
        trans = np.zeros((n, n))
        for w in range(1, n + 1):
            both_zero = (n - w) * (n - w - 1) / 2.0 / pairs
            one_nonzero = w * (n - w) / pairs
            both_nonzero = w * (w - 1) / 2.0 / pairs
            trans[w - 1, w - 1] += both_zero
            for v, pick in ((1, one_nonzero), (2, both_nonzero)):
                for u, frac in ((1, 6.0 / 15.0), (2, 9.0 / 15.0)):
                    w_new = w - v + u
                    if 1 <= w_new <= n:
                        trans[w - 1, w_new - 1] += pick * frac
    weights = np.arange(1, n + 1)
    log_pi = (
        np.array([_log_binomial(n, int(w)) for w in weights]) + weights * np.log(3.0)
    )
    pi = np.exp(log_pi - log_pi.max())
    pi /= pi.sum()
    return WeightChain(n, trans, pi)


def _log_binomial(n: int, k: int) -> float:
    from math import lgamma

    return lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1)


def exact_gap(n: int) -> float:
    """Spectral gap ``1 - lambda_2`` of the weight chain.

    Reversibility makes the similarity-transformed matrix symmetric, so the
    spectrum is real and a symmetric eigensolver applies.  At ``n = 2`` both
    rows of the chain coincide, giving the closed form ``lambda_2 = trace - 1
    = 0`` exactly: the gap is exactly 1.
    """
    chain = lumped_matrix(n)
    if n == 2:
        trace = Fraction(0)
        for k, row in enumerate(lumped_matrix_rational(2)):
            trace += row[k]
        return float(1 - (trace - 1))
    d = np.sqrt(chain.stationary)
    sym = (d[:, None] * chain.transition) / d[None, :]
    eigs = np.sort(np.linalg.eigvalsh(0.5 * (sym + sym.T)))
    return float(1.0 - eigs[-2])


def gap_table(ns) -> list[dict]:
    """Rows ``{n, gap, gap*n, gap*n^2}`` for the requested sizes."""
    rows = []
    for n in ns:
        g = exact_gap(int(n))
        rows.append({"n": int(n), "gap": g, "gap_n": g * n, "gap_n2": g * n * n})
    return rows


# ---------------------------------------------------------------------------
# Full-chain bookkeeping at n <= 4: moment matching against real circuits
# ---------------------------------------------------------------------------


def all_strings(n: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(4), repeat=n))


def full_transition_matrix(n: int) -> np.ndarray:
    """Dense ``4^n x 4^n`` chain matrix (row-stochastic), for small ``n``."""
    if n > MAX_FULL_CHAIN_N:
        raise SizeError(f"full chain capped at n={MAX_FULL_CHAIN_N}")
    strings = all_strings(n)
    index = {s: k for k, s in enumerate(strings)}
    size = len(strings)
    pairs = list(itertools.combinations(range(n), 2))
    trans = np.zeros((size, size))
    for s, row in zip(strings, range(size)):
        for i, j in pairs:
            if s[i] == 0 and s[j] == 0:
                trans[row, row] += 1.0 / len(pairs)
                continue
            for a, b in NONZERO_PAIRS:
                t = list(s)
                t[i], t[j] = int(a), int(b)
                trans[row, index[tuple(t)]] += 1.0 / (len(pairs) * 15.0)
    return trans


_SIGMA_STACK_CACHE: dict[int, np.ndarray] = {}


def sigma_stack(n: int) -> np.ndarray:
    """All ``4^n`` Pauli-string matrices, stacked; cached per ``n``."""
    if n not in _SIGMA_STACK_CACHE:
        if n > MAX_FULL_CHAIN_N:
            raise SizeError(f"Pauli bookkeeping capped at n={MAX_FULL_CHAIN_N}")
        _SIGMA_STACK_CACHE[n] = np.array(
            [PauliString(codes).matrix() for codes in all_strings(n)]
        )
    return _SIGMA_STACK_CACHE[n]


def gamma_squared(state: PureState) -> np.ndarray:
    """Squared Pauli coefficients of a pure state, over all ``4^n`` strings."""
    n = state.n_qubits
    psi = state.amplitudes
    coeffs = np.einsum("i,pij,j->p", psi.conj(), sigma_stack(n), psi) * 2 ** (-n / 2)
    return np.abs(coeffs) ** 2


def initial_gamma_squared(n: int, a: int = 0) -> np.ndarray:
    """Squared Pauli coefficients of a computational basis state ``|a>``.

    Mass ``2^-n`` on each of the ``2^n`` diagonal strings (codes 0 and 1),
    zero elsewhere.
    """
    out = np.zeros(4**n)
    for k, codes in enumerate(all_strings(n)):
        if all(c in (0, 1) for c in codes):
            out[k] = 2.0**-n
    return out


def moment_compare(
    n: int,
    steps: int,
    circuits: int,
    rng: np.random.Generator,
    a: int = 0,
) -> dict:
    """Total-variation gap between circuit-averaged and chain-evolved moments.

    The left side applies ``circuits`` independent random gate sequences of
    length ``steps`` to ``|a>`` and averages the squared Pauli coefficients;
    the right side evolves the basis state's coefficient distribution with
    the exact chain matrix.  Matching expectations make the gap pure Monte
    Carlo error.
    """
    if n > MAX_FULL_CHAIN_N:
        raise SizeError(f"moment comparison capped at n={MAX_FULL_CHAIN_N}")
    if steps > 50:
        raise InvalidConfigError("step count capped at 50")
    from .simcore import apply_matrix_to_qubits, basis_vector

    pair_list = list(itertools.combinations(range(n), 2))
    acc = np.zeros(4**n)
    for _ in range(circuits):
        vec = basis_vector(n, a)
        for _step in range(steps):
            i, j = pair_list[int(rng.integers(len(pair_list)))]
            gate = sample_haar_two_qubit(rng)
            vec = apply_matrix_to_qubits(vec, n, gate.entries, (i, j))
        acc += gamma_squared(PureState(n, vec))
    lhs = acc / circuits
    rhs = GammaDistribution.initial(n, a).stepped(full_transition_matrix(n), steps)
    tv = 0.5 * float(np.sum(np.abs(lhs - rhs.masses)))
    return {
        "n": n,
        "t": steps,
        "circuits": circuits,
        "tv_distance": tv,
        "lhs_mass": float(lhs.sum()),
        "rhs_mass": float(rhs.masses.sum()),
    }


# ---------------------------------------------------------------------------
# Two-copy gate average and collision statistics
# ---------------------------------------------------------------------------


def pauli_transfer(gate: np.ndarray) -> np.ndarray:
    """16x16 conjugation matrix ``tr(sigma_p W sigma_q W^dag)/4`` on two sites.

    Real for any unitary gate (conjugation preserves Hermiticity in the
    Hermitian Pauli basis); the residual imaginary part is asserted small.
    """
    sigmas = sigma_stack(2)
    conjugated = np.einsum("ij,qjk,lk->qil", gate, sigmas, gate.conj())
    ad = np.einsum("pij,qji->pq", sigmas, conjugated) / 4.0
    imag = float(np.abs(ad.imag).max())
    if imag > 1e-12:
        raise InvalidConfigError(f"transfer matrix not real: residual {imag:.2e}")
    return ad.real


def two_copy_target() -> np.ndarray:
    """The exact gate average of the doubled transfer matrix.

    Rank-two projector: the identity string's corner plus the maximally
    correlated combination of the 15 nonzero strings.
    """
    e00 = np.zeros(16)
    e00[0] = 1.0
    xi = np.zeros(256)
    for k in range(1, 16):
        xi[k * 16 + k] = 1.0
    xi /= np.sqrt(15.0)
    return np.outer(np.kron(e00, e00), np.kron(e00, e00)) + np.outer(xi, xi)


def verify_mean_ad2(samples: int, rng: np.random.Generator) -> dict:
    """Monte Carlo check of the two-copy gate average against its projector.

    Draws ``samples`` Haar gates, averages ``kron(ad_W, ad_W)`` and returns
    Frobenius distances to the rank-two target, plus worst-case
    orthogonality and reality defects of the sampled transfer matrices.

    Two distances are reported.  ``frobenius_distance_full`` covers the
    whole 256x256 mean; a single sample has Frobenius norm exactly 16, so
    this distance concentrates at ``sqrt(254 / samples)`` no matter how the
    gates are drawn.  ``frobenius_distance_moment_rows`` restricts to the 16
    doubled-bra rows ``<pp|``, which are the only rows the squared Pauli
    coefficient evolution reads; there a sample row block has norm 1 and
    the distance concentrates at ``sqrt(14 / samples)``.
    """
    if samples < 100:
        raise InvalidConfigError("need at least 100 samples")
    chunk = two_copy_chunk(samples, rng)
    return two_copy_finalize([chunk])


def two_copy_chunk(samples: int, rng: np.random.Generator) -> dict:
    """Partial sums for the two-copy average over ``samples`` Haar draws."""
    acc = np.zeros((256, 256))
    max_orth = 0.0
    max_imag = 0.0
    max_corner = 0.0
    sigmas = sigma_stack(2)
    eye16 = np.eye(16)
    for _ in range(samples):
        w = sample_haar_two_qubit(rng).entries
        conjugated = np.einsum("ij,qjk,lk->qil", w, sigmas, w.conj())
        ad_complex = np.einsum("pij,qji->pq", sigmas, conjugated) / 4.0
        max_imag = max(max_imag, float(np.abs(ad_complex.imag).max()))
        ad = ad_complex.real
        max_orth = max(max_orth, float(np.abs(ad.T @ ad - eye16).max()))
        corner = max(
            float(np.abs(ad[0] - eye16[0]).max()), float(np.abs(ad[:, 0] - eye16[0]).max())
        )
        max_corner = max(max_corner, corner)
        acc += np.kron(ad, ad)
    return {
        "samples": samples,
        "acc": acc,
        "max_orth": max_orth,
        "max_imag": max_imag,
        "max_corner": max_corner,
    }


def two_copy_finalize(chunks) -> dict:
    """Combine chunk sums (in the given order) into the distance report."""
    total = sum(c["samples"] for c in chunks)
    acc = np.zeros((256, 256))
    for c in chunks:
        acc += c["acc"]
    mean = acc / total
    target = two_copy_target()
    doubled = [p * 16 + p for p in range(16)]
    return {
        "samples": total,
        "frobenius_distance_full": float(np.linalg.norm(mean - target)),
        "frobenius_distance_moment_rows": float(
            np.linalg.norm(mean[doubled, :] - target[doubled, :])
        ),
        "max_orthogonality_defect": max(c["max_orth"] for c in chunks),
        "max_imag_part": max(c["max_imag"] for c in chunks),
        "max_corner_defect": max(c["max_corner"] for c in chunks),
    }


def circuit_collision_sample(
    n: int, steps: int, rng: np.random.Generator, a: int = 0
) -> tuple[float, float]:
    """One random circuit applied to ``|a>``: its collision and L1 statistics."""
    if n > 12:
        raise SizeError("collision statistics capped at n=12")
    from .simcore import apply_matrix_to_qubits, basis_vector

    pair_list = list(itertools.combinations(range(n), 2))
    vec = basis_vector(n, a)
    for _step in range(steps):
        i, j = pair_list[int(rng.integers(len(pair_list)))]
        gate = sample_haar_two_qubit(rng)
        vec = apply_matrix_to_qubits(vec, n, gate.entries, (i, j))
    probs = np.abs(vec) ** 2
    return float(np.sum(probs**2)), float(np.sum(np.sqrt(probs)))


def q_t_statistics(
    n: int,
    steps: int,
    circuits: int,
    rng: np.random.Generator,
    a: int = 0,
    collect_l1: bool = False,
) -> dict:
    """Collision probability of random-circuit states: mean and tail data.

    Applies ``circuits`` independent length-``steps`` gate sequences to
    ``|a>`` and records ``sum_x |amp(x)|^4`` for each; optionally also the
    L1 norms for tail cross-checks.
    """
    q_values = np.zeros(circuits)
    l1_values = np.zeros(circuits) if collect_l1 else None
    for k in range(circuits):
        q, l1 = circuit_collision_sample(n, steps, rng, a)
        q_values[k] = q
        if collect_l1:
            l1_values[k] = l1
    out = {
        "n": n,
        "t": steps,
        "circuits": circuits,
        "mean_q": float(np.mean(q_values)),
        "stderr_q": float(np.std(q_values, ddof=1) / np.sqrt(circuits)) if circuits > 1 else 0.0,
        "q_values": q_values,
    }
    if collect_l1:
        out["l1_values"] = l1_values
    return out
