import math

import numpy as np
import pytest

from mmtc_bounds import bounds
from mmtc_bounds.errors import DomainError

from oracles import lb_ebn0_retx_grid

# frozen from mpmath closed-form evaluation
LB_SNR_T1 = 2.7275929207827217
LB_EBN0_T2 = 1.4369029831915206
LB_SNR_T3 = 0.45766213815534663


def test_closed_forms():
    assert bounds.lb_snr_no_retx(0.1, 0.9) == pytest.approx(LB_SNR_T1, rel=1e-13)
    assert bounds.lb_ebn0_no_retx(0.1, 0.9) == pytest.approx(LB_EBN0_T2, rel=1e-13)
    assert bounds.lb_snr_retx(0.1) == pytest.approx(LB_SNR_T3, rel=1e-13)


def test_small_rho_limits():
    assert bounds.lb_snr_no_retx(1e-9, 0.9) < 1e-7
    assert bounds.lb_ebn0_no_retx(1e-9, 0.9) == pytest.approx(math.log(2), rel=1e-6)
    assert bounds.lb_snr_retx(1e-9) < 1e-7
    # optimum sits near g = sqrt(rho ln 2), value ln2 * (1 + 2 g)
    value, g_star = bounds.lb_ebn0_retx(1e-8)
    assert value == pytest.approx(math.log(2), rel=1e-3)
    assert g_star < 1e-3


def test_identities():
    r = 0.1 / math.log(1 / 0.9)
    assert bounds.lb_ebn0_no_retx(0.1, 0.9) == pytest.approx(bounds.lb_snr_no_retx(0.1, 0.9) / (2 * r), rel=1e-14)
    assert bounds.ebn0_bound_at_g(0.1, 1.0) == pytest.approx(bounds.lb_snr_retx(0.1) / 0.2, rel=1e-14)
    assert bounds.lb_snr_retx(0.1) < bounds.lb_snr_no_retx(0.1, 0.9)


def test_monotone_in_pd():
    pds = np.linspace(0.5, 0.99, 50)
    vals = [bounds.lb_snr_no_retx(0.1, pd) for pd in pds]
    assert np.all(np.diff(vals) > 0)


def test_task4_bound_against_grid_oracle():
    value, g_star = bounds.lb_ebn0_retx(0.1)
    ref, g_ref = lb_ebn0_retx_grid(0.1)
    assert value <= ref
    assert 10 * math.log10(ref / value) < 1e-3
    assert g_star == pytest.approx(0.27, abs=0.01)
    assert value == pytest.approx(1.295, abs=5e-4)


def test_all_increasing_in_rho():
    rhos = np.linspace(0.01, 0.5, 25)
    for f in (lambda r: bounds.lb_snr_no_retx(r, 0.9), lambda r: bounds.lb_ebn0_no_retx(r, 0.9),
              bounds.lb_snr_retx, lambda r: bounds.lb_ebn0_retx(r)[0]):
        assert np.all(np.diff([f(r) for r in rhos]) > 0)


@pytest.mark.parametrize("rho", [0.01, 0.05, 0.1, 0.2, 0.5])
def test_g_optimisation_helps(rho):
    assert bounds.lb_ebn0_retx(rho)[0] <= bounds.lb_snr_retx(rho) / (2 * rho)


def test_lower_bounds_bundle():
    b = bounds.lower_bounds(0.1)
    assert b.lb_snr_t1 is None and b.lb_ebn0_t2 is None
    assert 0 < b.g_star_t4 <= 1
    full = bounds.lower_bounds(0.1, 0.9)
    assert full.lb_snr_t1 == pytest.approx(LB_SNR_T1)


@pytest.mark.parametrize("pd", [0.0, 1.0, -0.5])
def test_bad_pd(pd):
    with pytest.raises(DomainError):
        bounds.lb_snr_no_retx(0.1, pd)
