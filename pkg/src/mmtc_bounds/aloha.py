"""Slotted-ALOHA layer of the analytic model.

Everything here is expressed through the spectral efficiency rho (bits per
channel sample); the per-slot arrival rate is recovered as rho * n / k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleSpecError
from .fbl import _out, pe_normal_approx

NO_RETX = "no_retx"
RETX = "retx"


@dataclass(frozen=True)
class NoRetxParams:
    k: int
    rho: float
    pd: float

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"k must be >= 1, got {self.k}")
        if not self.rho > 0:
            raise DomainError(f"rho must be positive, got {self.rho}")
        if not 0.0 < self.pd < 1.0:
            raise DomainError(f"pd must lie in (0, 1), got {self.pd}")


@dataclass(frozen=True)
class RetxParams:
    k: int
    rho: float
    g: float = 1.0

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"k must be >= 1, got {self.k}")
        if not self.rho > 0:
            raise DomainError(f"rho must be positive, got {self.rho}")
        if not 0.0 < self.g <= 1.0:
            raise DomainError(f"g must lie in (0, 1], got {self.g}")


def arrival_rate(k, n, rho):
    """Messages per slot carried at spectral efficiency rho."""
    return rho * n / k


def pdr_no_retx(k, rho, n, snr):
    """Delivery probability of a one-shot message: no other arrival in its slot and no decoding error."""
    return _out(np.exp(-rho * np.asarray(n, dtype=float) / k) * (1.0 - pe_normal_approx(k, n, snr)))


def pe_target_no_retx(k, rho, pd, n):
    """Largest decoding error probability that still meets the delivery ratio pd.

    A non-positive value means blocklength n cannot meet pd at any SNR.
    """
    return _out(1.0 - pd * np.exp(rho * np.asarray(n, dtype=float) / k))


def pe_target_retx(k, rho, g, n):
    """Largest decoding error probability that sustains spectral efficiency rho with intensity g."""
    return _out(1.0 - rho * np.asarray(n, dtype=float) / (k * g * math.exp(-g)))


def throughput_retx(k, n, g, snr):
    """Spectral efficiency (bits/sample) carried by the backlogged ALOHA policy."""
    return _out(k / np.asarray(n, dtype=float) * g * math.exp(-g) * (1.0 - pe_normal_approx(k, n, snr)))


def optimal_g() -> float:
    """Maximiser of G*exp(-G) over (0, 1]."""
    return 1.0


def avg_transmissions(k, n, rho, g, pi0=0.0):
    """Average number of transmissions per delivered message.

    pi0 is the stationary probability of an empty backlog; pi0 = 1 (no active
    devices at all) returns 0.
    """
    if not 0.0 <= pi0 <= 1.0:
        raise DomainError(f"pi0 must lie in [0, 1], got {pi0}")
    if pi0 == 1.0:
        return 0.0
    return k * g * (1.0 - pi0) / (rho * n)


def feasible_n_range(mode, k, rho, pd=None, g=None):
    """Blocklengths for which the error-probability target lies strictly inside (0, 1).

    Returns (1, n_max). Raises InfeasibleSpecError when n_max < 1.
    """
    if mode == NO_RETX:
        params = NoRetxParams(k, rho, pd)
        # pd * exp(rho n / k) < 1  <=>  n < k ln(1/pd) / rho
        bound = k * math.log(1.0 / params.pd) / params.rho
        n_max = math.ceil(bound) - 1
        while n_max >= 1 and pe_target_no_retx(k, rho, pd, n_max) <= 0:
            n_max -= 1
        while pe_target_no_retx(k, rho, pd, n_max + 1) > 0:
            n_max += 1
    elif mode == RETX:
        params = RetxParams(k, rho, 1.0 if g is None else g)
        n_max = math.ceil(k * params.g * math.exp(-params.g) / params.rho) - 1
        while n_max >= 1 and pe_target_retx(k, rho, params.g, n_max) <= 0:
            n_max -= 1
        while pe_target_retx(k, rho, params.g, n_max + 1) > 0:
            n_max += 1
    else:
        raise DomainError(f"unknown mode {mode!r}")
    if n_max < 1:
        raise InfeasibleSpecError(f"no blocklength satisfies the constraint ({mode}, k={k}, rho={rho})")
    return 1, n_max
