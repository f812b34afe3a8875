"""Finite-blocklength primitives.

Gaussian tail function, the normal approximation of the decoding error
probability on the real AWGN channel, and the SNR / Eb/N0 / dB conversions.
The vectorised functions accept scalars or numpy arrays and return a float
for scalar input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .errors import DomainError

LOG2_E = math.log2(math.e)
_SQRT2 = math.sqrt(2.0)


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def q_function(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x).

    Evaluated as erfc(x/sqrt(2))/2, which keeps full relative precision in
    the upper tail until it underflows to 0 (around x = 38). Negative
    arguments use 1 - Q(-x); below -8 the result is exactly 1.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("q_function requires a finite argument")
    tail = 0.5 * erfc(np.abs(x) / _SQRT2)
    q = np.where(x >= 0, tail, 1.0 - tail)
    q = np.where(x < -8.0, 1.0, q)
    return _out(q)


def dispersion_argument(k, n, snr):
    """Argument of Q in the normal approximation: rate surplus over dispersion."""
    k = np.asarray(k, dtype=float)
    n = np.asarray(n, dtype=float)
    snr = np.asarray(snr, dtype=float)
    surplus = 0.5 * n * np.log2(1.0 + snr) + 0.5 * np.log2(n) - k
    # log2(e) sits outside the root: V = V' * log2(e)^2
    v_prime = snr * (snr + 2.0) / (2.0 * (snr + 1.0) ** 2)
    return _out(surplus / (np.sqrt(n * v_prime) * LOG2_E))


def pe_normal_approx(k, n, snr):
    """Decoding error probability of a (k bits, n samples) code at the given linear SNR."""
    x = dispersion_argument(k, n, snr)
    return _out(np.clip(q_function(x), 0.0, 1.0))


@dataclass(frozen=True)
class CodePoint:
    """An operating point of a finite-blocklength code."""

    k: int
    n: int
    snr: float

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise DomainError(f"k and n must be >= 1, got k={self.k}, n={self.n}")
        if not self.snr > 0:
            raise DomainError(f"snr must be positive, got {self.snr}")

    @property
    def pe(self) -> float:
        return pe_normal_approx(self.k, self.n, self.snr)

    @property
    def ebn0(self) -> float:
        return snr_to_ebn0(self.n, self.k, self.snr)


def snr_to_ebn0(n, k, snr):
    """Eb/N0 = n * SNR / (2k)."""
    return n * snr / (2.0 * k)


def ebn0_to_snr(n, k, ebn0):
    return 2.0 * k * ebn0 / n


def _check_g(g):
    if not 0.0 < g <= 1.0:
        raise DomainError(f"transmission intensity g must lie in (0, 1], got {g}")


def snr_from_ebn0_retx(ebn0, rho, g):
    """SNR needed for a given Eb/N0 when every delivery costs on average k*g/(rho*n) attempts."""
    _check_g(g)
    return 2.0 * rho * ebn0 / g


def ebn0_from_snr_retx(snr, rho, g):
    _check_g(g)
    return g * snr / (2.0 * rho)


def to_db(x):
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise DomainError("to_db requires a positive argument")
    return _out(10.0 * np.log10(x_arr))


def from_db(d):
    return _out(10.0 ** (np.asarray(d, dtype=float) / 10.0))
