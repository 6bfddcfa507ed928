import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qubitmaps import (REFERENCE_BATH, BathParams, Regime, ZeroFreqLimit, bath_correlation,
                       planck_occupation, spectral_density, zero_frequency_limit)
from qubitmaps.errors import DomainError, UnrepresentableValueError


def test_planck_golden():
    assert abs(planck_occupation(1.0, 10.0) - 9.508331944775049624) < 1e-14


def test_spectral_density_golden():
    assert abs(spectral_density(100.0, BathParams(1, 1, 100, 10)) - 36.78794411714423216) < 1e-13
    assert abs(spectral_density(10.0, BathParams(1, 2, 100, 10)) - 90.483741803595956814) < 1e-13
    assert spectral_density(0.0, REFERENCE_BATH) == 0.0


def test_bath_correlation_golden():
    assert abs(bath_correlation(1.0, REFERENCE_BATH) - 10.40377229490560969) < 1e-13


@pytest.mark.parametrize("x", [1e-12, 1e-6, 1e-2, 0.5, 1.0, 30.0, 300.0, 700.0])
def test_planck_against_mpmath(x):
    ref = float(1 / mpmath.expm1(mpmath.mpf(x)))
    assert abs(planck_occupation(x, 1.0) - ref) <= 2e-16 * ref


def test_planck_extreme_arguments():
    # no overflow warning, smooth underflow to zero
    with np.errstate(over="raise", invalid="raise", divide="raise"):
        assert planck_occupation(1e5, 1.0) == 0.0
        assert planck_occupation(1e-300, 1.0) == pytest.approx(1e300, rel=1e-12)
    n = planck_occupation(np.array([0.1, 1.0, 10.0]), 2.0)
    assert isinstance(n, np.ndarray) and n.shape == (3,)
    assert isinstance(planck_occupation(1.0, 2.0), float)


@pytest.mark.parametrize("omega, T", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -3.0)])
def test_planck_domain(omega, T):
    with pytest.raises(DomainError):
        planck_occupation(omega, T)


@settings(max_examples=200, deadline=None)
@given(w=st.floats(1e-6, 500.0), T=st.floats(0.05, 100.0), g=st.floats(0.01, 10.0),
       s=st.sampled_from([0.5, 1.0, 1.5, 2.0, 3.0]), wc=st.floats(1.0, 500.0))
def test_detailed_balance(w, T, g, s, wc):
    bath = BathParams(g, s, wc, T)
    lhs = bath_correlation(-w, bath)
    rhs = math.exp(-w / T) * bath_correlation(w, bath)
    assert abs(lhs - rhs) <= 1e-13 * max(abs(rhs), 1e-300)


@settings(max_examples=100, deadline=None)
@given(w=st.floats(1e-3, 200.0), T=st.floats(0.1, 50.0))
def test_correlation_branches(w, T):
    bath = BathParams(1.3, 1.0, 80.0, T)
    n = planck_occupation(w, T)
    g = spectral_density(w, bath)
    assert bath_correlation(w, bath) == pytest.approx(g * (1 + n), rel=1e-13)
    assert bath_correlation(-w, bath) == pytest.approx(g * n, rel=1e-13)


def test_zero_frequency_limits():
    ohmic = BathParams(2.0, 1.0, 100.0, 3.0)
    assert bath_correlation(0.0, ohmic) == pytest.approx(6.0)
    assert zero_frequency_limit(ohmic).value == pytest.approx(6.0)
    # continuity through zero
    assert bath_correlation(1e-9, ohmic) == pytest.approx(6.0, rel=1e-8)
    assert bath_correlation(-1e-9, ohmic) == pytest.approx(6.0, rel=1e-8)

    sup = BathParams(1.0, 2.0, 100.0, 3.0)
    assert bath_correlation(0.0, sup) == 0.0
    assert zero_frequency_limit(sup).kind is ZeroFreqLimit.Kind.ZERO

    sub = BathParams(1.0, 0.5, 100.0, 3.0)
    lim = zero_frequency_limit(sub)
    assert lim.is_infinite and str(lim) == "inf"
    with pytest.raises(UnrepresentableValueError):
        lim.value
    with pytest.raises(UnrepresentableValueError):
        float(lim)
    with pytest.raises(UnrepresentableValueError):
        bath_correlation(0.0, sub)
    # away from zero the sub-ohmic correlation is finite and grows toward it
    d = bath_correlation(np.array([1e-4, 1e-2]), sub)
    assert np.all(np.isfinite(d)) and d[0] > d[1]


def test_zero_freq_limit_constructors():
    with pytest.raises(DomainError):
        ZeroFreqLimit.finite(0.0)
    with pytest.raises(DomainError):
        ZeroFreqLimit.finite(math.inf)
    assert float(ZeroFreqLimit.zero()) == 0.0


def test_regimes():
    assert BathParams(s=0.3).regime is Regime.SUB_OHMIC
    assert BathParams(s=1.0).regime is Regime.OHMIC
    assert BathParams(s=2.5).regime is Regime.SUPER_OHMIC


@pytest.mark.parametrize("kwargs", [dict(s=0.0), dict(s=-1.0), dict(T=0.0), dict(g=-1.0),
                                    dict(omega_c=0.0), dict(T=math.nan)])
def test_bath_params_validation(kwargs):
    with pytest.raises(DomainError):
        BathParams(**kwargs)


def test_spectral_density_rejects_negative_frequency():
    with pytest.raises(DomainError):
        spectral_density(-1.0, REFERENCE_BATH)
    with pytest.raises(DomainError):
        bath_correlation(math.inf, REFERENCE_BATH)


def test_vectorised_correlation_matches_scalar():
    w = np.linspace(-50, 50, 101)
    vec = bath_correlation(w, REFERENCE_BATH)
    scal = np.array([bath_correlation(float(x), REFERENCE_BATH) for x in w])
    assert np.array_equal(vec, scal)
