"""L1 dispersion of circuit columns and the fourth-moment machinery.

A unitary ``U`` on n qubits disperses a basis label ``a`` when the L1 norm
of ``U^dag |a>`` is large; the certificate enumerates every label and
collects those meeting ``beta * 2^(n/2)``.  For block-structured unitaries
(group Fourier transforms) the same question is asked after appending an
ancilla vector inside the label's block; a randomized search over that
block's subspace records the achieved L1 values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, InvalidConfigError, LabelError
from .simcore import FourierMatrix, PureState, adjoint_rows

THRESHOLD_SLACK = 1e-12
DEFAULT_PSI_SAMPLES = 2000


@dataclass(frozen=True)
class DispersionReport:
    """Per-label L1 norms and the set of labels meeting the threshold."""

    n_qubits: int
    beta: float
    per_label_l1: np.ndarray = field(repr=False)
    achieving_set: tuple[int, ...]
    alpha_achieved: float

    def to_json_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "beta": self.beta,
            "per_label_l1": [float(v) for v in self.per_label_l1],
            "achieving_set_size": len(self.achieving_set),
            "alpha_achieved": self.alpha_achieved,
        }


@dataclass(frozen=True)
class PseudoDispersionReport:
    """Sampled L1 values for one output block of a group Fourier matrix."""

    group_name: str
    label: tuple[str, int]
    m_bits: int
    samples: int
    l1_values: np.ndarray = field(repr=False)
    best_psi: np.ndarray = field(repr=False)
    bound: float

    @property
    def best_value(self) -> float:
        return float(np.max(self.l1_values))

    @property
    def mean_value(self) -> float:
        return float(np.mean(self.l1_values))

    def standard_error(self) -> float:
        if self.samples < 2:
            return 0.0
        return float(np.std(self.l1_values, ddof=1) / np.sqrt(self.samples))

    def to_json_dict(self) -> dict:
        return {
            "group": self.group_name,
            "label": list(self.label),
            "m_bits": self.m_bits,
            "samples": self.samples,
            "mean": self.mean_value,
            "best": self.best_value,
            "bound": self.bound,
        }


def l1_row(action, a: int) -> float:
    """L1 norm of ``U^dag |a>``, from one state-vector run of the circuit."""
    if not 0 <= a < 2**action.n_qubits:
        raise LabelError(f"label {a} out of range")
    return float(np.sum(np.abs(adjoint_rows(action, a))))


def certify_dispersing(action, beta: float) -> DispersionReport:
    """Enumerate all ``2^n`` labels and certify the dispersion threshold.

    A label achieves when its L1 is at least ``beta * 2^(n/2)`` up to a
    1e-12 boundary slack, so certification is reproducible across platforms.
    """
    if not 0 < beta <= 1:
        raise InvalidConfigError("beta must lie in (0, 1]")
    n = action.n_qubits
    dim = 2**n
    l1 = np.array([l1_row(action, a) for a in range(dim)])
    threshold = beta * 2 ** (n / 2)
    achieving = tuple(int(a) for a in np.nonzero(l1 >= threshold - THRESHOLD_SLACK)[0])
    alpha = float(np.log2(len(achieving)) / n) if achieving else 0.0
    return DispersionReport(n, beta, l1, achieving, alpha)


def pseudo_search(
    fourier: FourierMatrix,
    label: tuple[str, int],
    samples: int = DEFAULT_PSI_SAMPLES,
    rng: np.random.Generator | None = None,
) -> PseudoDispersionReport:
    """Sample ancilla vectors inside one output block and record L1 norms.

    For block ``(rep, i)`` of the Fourier matrix, the candidate vectors live
    in ``V = span{ U^dag |rep, i, j> : j = 1..d }``.  Each sample draws
    ``psi`` uniformly from the unit sphere of ``V`` (i.i.d. complex Gaussian
    coefficients, normalized) and records ``sum_g |<g|psi>|``.  The rows of a
    unitary are orthonormal, so Gaussian coefficients over the block rows
    give exactly the uniform sphere measure on ``V``.
    """
    if rng is None:
        raise InvalidConfigError("pseudo_search requires an explicit rng stream")
    if samples < 1:
        raise InvalidConfigError("need at least one sample")
    rows = fourier.rows_for_block(*label)
    if not rows:
        raise LabelError(f"no block {label} in Fourier matrix")
    order = fourier.group.order
    # <g | U^dag |row> = conj(entries[row, g]).
    block = fourier.entries[rows, :].conj()  # (d, |G|)
    d = len(rows)
    coeff = rng.standard_normal((samples, d)) + 1j * rng.standard_normal((samples, d))
    coeff /= np.linalg.norm(coeff, axis=1, keepdims=True)
    vectors = coeff @ block  # (samples, |G|)
    l1_values = np.sum(np.abs(vectors), axis=1)
    best = int(np.argmax(l1_values))
    m_bits = max(1, int(np.ceil(np.log2(len(fourier.block_labels())))))
    return PseudoDispersionReport(
        group_name=fourier.group.name,
        label=label,
        m_bits=m_bits,
        samples=samples,
        l1_values=l1_values,
        best_psi=coeff[best].copy(),
        bound=float(np.sqrt(order / 2.0)),
    )


def pseudo_alpha(fourier: FourierMatrix) -> tuple[float, bool]:
    """Label-set exponent of a Fourier matrix's output blocks.

    There are ``sum_rep d_rep`` output labels ``(rep, i)``; the exponent is
    reported relative to ``log2 |G|`` qubits.  The flag marks orders that are
    not powers of two, where the label register does not embed exactly into
    qubits and the exponent is only nominal.
    """
    n_blocks = len(fourier.block_labels())
    order = fourier.group.order
    alpha = float(np.log2(n_blocks) / np.log2(order))
    return alpha, (order & (order - 1)) == 0


def fourth_moment_check(values) -> tuple[float, float, bool]:
    """Check ``E|Y| >= (E Y^2)^(3/2) / (E Y^4)^(1/2)`` on an empirical sample.

    Returns ``(lhs, rhs, passed)``.  The inequality holds for every true
    distribution, so the empirical version may only fail by rounding; the
    pass flag allows 1e-12.
    """
    y = np.asarray(values, dtype=float).ravel()
    if y.size == 0 or not np.any(y != 0):
        raise DegenerateInputError("fourth-moment check needs a nonzero sample")
    lhs = float(np.mean(np.abs(y)))
    m2 = float(np.mean(y**2))
    m4 = float(np.mean(y**4))
    rhs = m2**1.5 / np.sqrt(m4)
    return lhs, rhs, lhs >= rhs - 1e-12


def collision(state: PureState) -> float:
    """Collision probability ``sum_x |amp(x)|^4``; lies in ``[2^-n, 1]``."""
    return float(np.sum(np.abs(state.amplitudes) ** 4))
