import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mmtc_bounds.errors import DomainError
from mmtc_bounds.fbl import (
    CodePoint,
    dispersion_argument,
    ebn0_from_snr_retx,
    ebn0_to_snr,
    from_db,
    pe_normal_approx,
    q_function,
    snr_from_ebn0_retx,
    snr_to_ebn0,
    to_db,
)

# frozen from a 40-digit mpmath evaluation of erfc
Q_3 = 0.0013498980316300945
Q_16449 = 0.049995217468346303
PE_50_100_1 = 0.35345451855897789


def test_q_function_values():
    assert q_function(0.0) == 0.5
    assert q_function(3.0) == pytest.approx(Q_3, rel=1e-12)
    assert q_function(1.6449) == pytest.approx(Q_16449, rel=1e-12)
    assert q_function(-9.0) == 1.0


@pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
def test_q_function_rejects_non_finite(bad):
    with pytest.raises(DomainError):
        q_function(bad)


def test_q_function_grid_properties():
    x = np.linspace(-8, 8, 1000)
    q = q_function(x)
    assert np.all((q > 0) & (q < 1))
    assert np.all(np.diff(q) <= 0)
    # near x = -8 neighbouring values differ by less than one ulp of 1.0
    resolvable = np.abs(x[:-1]) <= 7.0
    assert np.all(np.diff(q)[resolvable] < 0)
    np.testing.assert_allclose(q + q_function(-x), 1.0, atol=1e-12)


def test_pe_examples():
    assert pe_normal_approx(50, 100, 1.0) == pytest.approx(PE_50_100_1, rel=1e-10)
    assert dispersion_argument(50, 100, 1.0) == pytest.approx(0.37601057114495768, rel=1e-12)
    assert pe_normal_approx(50, 100, 1000.0) < 1e-100
    assert pe_normal_approx(50, 100, 1.0) > pe_normal_approx(50, 100, 1.1)


def test_codepoint():
    p = CodePoint(50, 100, 1.0)
    assert p.pe == pytest.approx(PE_50_100_1, rel=1e-10)
    assert p.ebn0 == 1.0
    for bad in [(0, 10, 1.0), (10, 0, 1.0), (10, 10, 0.0)]:
        with pytest.raises(DomainError):
            CodePoint(*bad)


@pytest.mark.parametrize("k", [10, 30, 100, 300, 1000])
@pytest.mark.parametrize("ratio", [0.25, 0.5, 1, 2, 4])
def test_pe_monotone_in_snr(k, ratio):
    n = max(1, int(k * ratio))
    snr = from_db(np.linspace(-10, 20, 60))
    x = dispersion_argument(k, n, snr)
    pe = pe_normal_approx(k, n, snr)
    # strict decrease holds for the Q argument everywhere; for p_e wherever
    # neighbouring values are not saturated at 0 or 1 in double precision
    assert np.all(np.diff(x) > 0)
    assert np.all(np.diff(pe) <= 0)
    inner = (pe[:-1] < 1 - 1e-15) & (pe[1:] > 1e-300)
    assert np.all(np.diff(pe)[inner] < 0)


@pytest.mark.parametrize("k,n", [(10, 10), (50, 100), (1000, 250), (1000, 4000)])
def test_pe_tends_to_one_at_zero_snr(k, n):
    assert pe_normal_approx(k, n, 1e-9) > 0.999


def test_pe_vectorised_matches_scalar():
    ns = np.arange(40, 60)
    vec = pe_normal_approx(50, ns, 2.0)
    assert [pe_normal_approx(50, int(n), 2.0) for n in ns] == list(vec)


def test_conversion_examples():
    assert snr_to_ebn0(100, 50, 1.0) == 1.0
    assert snr_to_ebn0(50, 50, 2.0) == 1.0
    assert snr_to_ebn0(300, 100, 0.5) == 0.75
    assert snr_from_ebn0_retx(1.0, 0.5, 1.0) == 1.0
    assert snr_from_ebn0_retx(2.0, 0.1, 0.5) == pytest.approx(0.8, rel=1e-15)
    assert snr_from_ebn0_retx(1.295, 0.1, 0.27) == pytest.approx(0.959259, rel=1e-6)
    assert to_db(1.0) == 0.0
    assert to_db(10.0) == 10.0
    assert to_db(2.0) == pytest.approx(3.0102999566398120, rel=1e-14)


@pytest.mark.parametrize("g", [0.0, -0.1, 1.01])
def test_retx_conversion_rejects_bad_g(g):
    with pytest.raises(DomainError):
        snr_from_ebn0_retx(1.0, 0.1, g)


@pytest.mark.parametrize("x", [0.0, -1.0])
def test_to_db_rejects_non_positive(x):
    with pytest.raises(DomainError):
        to_db(x)


pos = st.floats(1e-6, 1e6)


@given(n=st.integers(1, 10**5), k=st.integers(1, 10**4), snr=pos)
def test_ebn0_round_trip(n, k, snr):
    assert ebn0_to_snr(n, k, snr_to_ebn0(n, k, snr)) == pytest.approx(snr, rel=1e-12)


@given(ebn0=pos, rho=st.floats(1e-4, 10), g=st.floats(1e-4, 1.0))
def test_retx_round_trip(ebn0, rho, g):
    assert ebn0_from_snr_retx(snr_from_ebn0_retx(ebn0, rho, g), rho, g) == pytest.approx(ebn0, rel=1e-12)


@given(x=st.floats(1e-30, 1e30))
def test_db_round_trip(x):
    assert from_db(to_db(x)) == pytest.approx(x, rel=1e-12)
