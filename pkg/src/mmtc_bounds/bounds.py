"""Shannon (infinite-blocklength) lower bounds for the four tasks.

Without retransmissions the delivery constraint exp(-rho/R) >= pd caps the
code rate at R = rho / ln(1/pd); with retransmissions the carried load is
at most G*exp(-G) messages per slot. Either way the SNR must exceed
2**(2R) - 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .solvers import g_grid, golden_section_min


@dataclass(frozen=True)
class LowerBounds:
    rho: float
    pd: float | None
    lb_snr_t1: float | None
    lb_ebn0_t2: float | None
    lb_snr_t3: float
    lb_ebn0_t4: float
    g_star_t4: float


def _check(rho, pd=None, need_pd=False):
    if not rho > 0:
        raise DomainError(f"rho must be positive, got {rho}")
    if need_pd and not (pd is not None and 0.0 < pd < 1.0):
        raise DomainError(f"pd must lie in (0, 1), got {pd}")


def _rate_no_retx(rho, pd):
    return rho / math.log(1.0 / pd)


def lb_snr_no_retx(rho: float, pd: float) -> float:
    _check(rho, pd, need_pd=True)
    return 2.0 ** (2.0 * _rate_no_retx(rho, pd)) - 1.0


def lb_ebn0_no_retx(rho: float, pd: float) -> float:
    _check(rho, pd, need_pd=True)
    two_r = 2.0 * _rate_no_retx(rho, pd)
    return math.expm1(two_r * math.log(2.0)) / two_r


def lb_snr_retx(rho: float) -> float:
    _check(rho)
    return 2.0 ** (2.0 * rho * math.e) - 1.0


def ebn0_bound_at_g(rho, g):
    """Eb/N0 bound with retransmissions at a fixed intensity g."""
    x = 2.0 * rho / (g * math.exp(-g))
    if x * math.log(2.0) > 700.0:
        return math.inf
    return math.expm1(x * math.log(2.0)) * g / (2.0 * rho)


def lb_ebn0_retx(rho: float, g_grid_step: float = 1e-3, g_refine_tol: float = 1e-6) -> tuple[float, float]:
    """Minimum over g in (0, 1] of the retransmission Eb/N0 bound; returns (value, g_star)."""
    _check(rho)
    grid = g_grid(g_grid_step)
    values = np.array([ebn0_bound_at_g(rho, g) for g in grid])
    i = int(np.argmin(values))
    a = grid[i - 1] if i > 0 else g_refine_tol
    b = grid[i + 1] if i + 1 < len(grid) else 1.0
    g_star, value = golden_section_min(lambda g: ebn0_bound_at_g(rho, g), a, b, g_refine_tol)
    if values[i] < value:
        g_star, value = float(grid[i]), float(values[i])
    return float(value), float(g_star)


def lower_bounds(rho: float, pd: float | None = None) -> LowerBounds:
    lb4, g_star = lb_ebn0_retx(rho)
    has_pd = pd is not None
    return LowerBounds(
        rho=rho,
        pd=pd,
        lb_snr_t1=lb_snr_no_retx(rho, pd) if has_pd else None,
        lb_ebn0_t2=lb_ebn0_no_retx(rho, pd) if has_pd else None,
        lb_snr_t3=lb_snr_retx(rho),
        lb_ebn0_t4=lb4,
        g_star_t4=g_star,
    )
