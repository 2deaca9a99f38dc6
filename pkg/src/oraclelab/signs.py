"""Compile a complex vector into a +-1 sign pattern that keeps most of its L1 mass.

For any nonzero ``x in C^d`` there is a sign vector ``theta in {+-1}^d`` with
``|sum_k theta_k x_k| >= (2/pi) * sum_k |x_k|``.  The witness is obtained by
maximizing ``g(phi) = sum_k |Re(exp(i phi) x_k)|`` exactly: ``g`` is piecewise
sinusoidal in ``phi`` with period pi, its breakpoints sit where some term's
real part vanishes, and on each open interval between breakpoints all the
term signs are constant, so ``g(phi) = A cos(phi) + B sin(phi)`` there with
interval-specific ``A, B``.  Evaluating the interior critical point of every
interval plus every breakpoint yields the global maximum with no grid or
tolerance knob.  The average of ``g`` over ``phi`` is ``(2/pi) sum|x_k|``,
so the maximum can never fall below that.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, SizeError

BRUTE_FORCE_MAX_D = 20
BREAKPOINT_DEDUP_TOL = 1e-15
TWO_OVER_PI = 2.0 / np.pi


@dataclass(frozen=True)
class SignSolution:
    """Best phase, resulting sign pattern, and the value it achieves."""

    phi_star: float
    theta: tuple[int, ...]
    value: float
    l1: float

    @property
    def ratio(self) -> float:
        return self.value / self.l1

    def to_json_dict(self) -> dict:
        return {
            "phi_star": self.phi_star,
            "theta": list(self.theta),
            "value": self.value,
            "l1": self.l1,
        }


def _signs_at(x: np.ndarray, phi: float) -> np.ndarray:
    """Signs of Re(exp(i phi) x_k); exact zeros resolve to +1 for determinism."""
    re = np.real(np.exp(1j * phi) * x)
    theta = np.where(re >= 0.0, 1, -1)
    return theta


def _g(x: np.ndarray, phi: float) -> float:
    return float(np.sum(np.abs(np.real(np.exp(1j * phi) * x))))


def best_phase_signs(x) -> SignSolution:
    """Exactly maximize ``g(phi) = sum |Re(exp(i phi) x_k)|`` and read off signs.

    Returns the maximizing phase ``phi_star`` in ``[0, pi)`` (g has period
    pi; the complementary half of the circle flips every sign globally and
    leaves the achieved value unchanged), the sign vector
    ``theta_k = sign(Re(exp(i phi_star) x_k))`` with exact zeros mapped to
    +1, and ``value = |sum_k theta_k x_k|``, which is at least ``g(phi_star)``.
    """
    xv = np.asarray(x, dtype=complex).ravel()
    if xv.size == 0 or not np.any(xv != 0):
        raise DegenerateInputError("sign compilation needs a nonzero vector")
    l1 = float(np.sum(np.abs(xv)))

    nonzero = xv[xv != 0]
    breaks = np.mod(np.pi / 2 - np.angle(nonzero), np.pi)
    breaks = np.unique(breaks)
    if breaks.size > 1:
        keep = np.concatenate(([True], np.diff(breaks) > BREAKPOINT_DEDUP_TOL))
        # The circle wraps: a breakpoint within tolerance of the first + pi
        # duplicates it as well.
        if breaks[keep][-1] > np.pi - BREAKPOINT_DEDUP_TOL and breaks[keep][0] < BREAKPOINT_DEDUP_TOL:
            keep_idx = np.nonzero(keep)[0]
            keep[keep_idx[-1]] = False
        breaks = breaks[keep]

    candidates = list(breaks)
    k = breaks.size
    for idx in range(k):
        lo = breaks[idx]
        hi = breaks[(idx + 1) % k] if k > 1 else lo + np.pi
        if hi <= lo:
            hi += np.pi
        mid = 0.5 * (lo + hi)
        theta_mid = _signs_at(xv, mid)
        z = complex(np.sum(theta_mid * xv))
        # On this interval g(phi) = Re(z) cos(phi) - Im(z) sin(phi); the
        # unconstrained maximum sits at atan2(-Im z, Re z) where g = |z|.
        crit = float(np.arctan2(-z.imag, z.real))
        for shift in (-np.pi, 0.0, np.pi, 2 * np.pi):
            phi_c = crit + shift
            if lo < phi_c < hi:
                candidates.append(np.mod(phi_c, np.pi))
                break

    best_phi = max(candidates, key=lambda phi: _g(xv, phi))
    theta = _signs_at(xv, best_phi)
    value = float(np.abs(np.sum(theta * xv)))
    return SignSolution(float(best_phi), tuple(int(t) for t in theta), value, l1)


def brute_force_signs(x) -> tuple[tuple[int, ...], float]:
    """Exact maximum of ``|sum theta_k x_k|`` over all ``2^d`` sign vectors.

    Ties resolve to the lexicographically smallest theta with +1 < -1.
    Only a validation oracle: cost is exponential in ``d``.
    """
    xv = np.asarray(x, dtype=complex).ravel()
    d = xv.size
    if d > BRUTE_FORCE_MAX_D:
        raise SizeError(f"brute force capped at d={BRUTE_FORCE_MAX_D}, got {d}")
    if d == 0:
        raise DegenerateInputError("empty vector")
    # Enumerate partial sums so index bit (d-1-k) encodes theta_k (0 -> +1);
    # ascending index order is then lexicographic order on theta.
    sums = np.zeros(1, dtype=complex)
    for k in range(d):
        sums = np.stack([sums + xv[k], sums - xv[k]], axis=1).reshape(-1)
    values = np.abs(sums)
    best = int(np.argmax(values))  # first occurrence wins: lexicographic tie-break
    theta = tuple(1 if not (best >> (d - 1 - k)) & 1 else -1 for k in range(d))
    return theta, float(values[best])
