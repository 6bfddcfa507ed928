import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qubitmaps import (EPSILON_LADDER, REFERENCE_BATH, BathParams, QuadratureConfig, adaptive_quad,
                       bath_correlation, epsilon_resolvent, extrapolate_to_zero,
                       principal_value, shift_delta, shift_delta_pm, shift_integrals)
from qubitmaps.errors import (DomainError, PoleCollisionError, QuadratureError,
                              SubOhmicDivergenceError)

# Shift integrals of the reference bath (g=1, s=1, omega_c=100, T=10) at omega0=5.
DELTA_5 = -0.5152121604032887
DELTA_PLUS_5 = -0.7873900678246575
DELTA_MINUS_5 = 0.2430342529818597


@pytest.mark.parametrize("degree", range(0, 23, 3))
def test_gauss_kronrod_polynomials(degree):
    value, err, _ = adaptive_quad(lambda x: x**degree, [(0.0, 1.0)], rel_tol=1e-14)
    assert abs(value - 1 / (degree + 1)) < 1e-14


def test_adaptive_quad_segments_and_kinks():
    value, _, panels = adaptive_quad(np.abs, [(-1.0, 0.0), (0.0, 2.0)])
    assert abs(value - 2.5) < 1e-14
    assert panels == 2
    value, _, _ = adaptive_quad(np.sqrt, [(0.0, 1.0)], rel_tol=1e-12)
    assert abs(value - 2 / 3) < 1e-11
    assert adaptive_quad(np.sin, []) == (0.0, 0.0, 0)


def test_adaptive_quad_panel_limit():
    with pytest.raises(QuadratureError) as info:
        adaptive_quad(lambda x: np.sin(1 / x), [(1e-6, 1.0)], rel_tol=1e-14, max_panels=50)
    assert info.value.panels > 50


def test_adaptive_quad_non_finite():
    with np.errstate(invalid="ignore"), pytest.raises(QuadratureError):
        adaptive_quad(lambda x: np.full_like(x, np.inf), [(0.0, 1.0)])


def test_pv_log2():
    assert abs(principal_value(lambda x: 1 / x, [0.0], (-1.0, 2.0)) - math.log(2)) < 1e-13


def test_pv_odd_integrand():
    assert abs(principal_value(lambda x: np.cos(x) / x, [0.0], (-3.0, 3.0))) < 1e-14


def test_pv_two_poles():
    # P int_{-2}^{3} dx / ((x-1)(x+1)) = (1/2)[ln|x-1| - ln|x+1|] evaluated
    ref = 0.5 * ((math.log(2) - math.log(4)) - (math.log(3) - math.log(1)))
    val = principal_value(lambda x: 1 / ((x - 1) * (x + 1)), [1.0, -1.0], (-2.0, 3.0))
    assert abs(val - ref) < 1e-12


def test_pv_errors():
    with pytest.raises(DomainError):
        principal_value(lambda x: 1 / x, [2.0], (-1.0, 1.0))
    with pytest.raises(DomainError):
        principal_value(lambda x: x, [], (1.0, 1.0))
    with pytest.raises(PoleCollisionError):
        principal_value(lambda x: 1 / x, [0.0, 0.0], (-1.0, 1.0))


def test_pv_against_independent_fold():
    # P int D(w)/(w-5) dw, reference from a 50-digit mpmath fold u -> 5 +- u
    val = principal_value(lambda w: bath_correlation(w, REFERENCE_BATH) / (w - 5.0), [5.0],
                          (-5000.0, 5000.0), breakpoints=[0.0])
    assert abs(val - 100.76351462373838) < 1e-10


def test_shift_goldens():
    s = shift_integrals(REFERENCE_BATH, 5.0)
    assert abs(s.delta - DELTA_5) < 1e-11
    assert abs(s.delta_plus - DELTA_PLUS_5) < 1e-11
    assert abs(s.delta_minus - DELTA_MINUS_5) < 1e-11
    assert abs(s.g0 - 4.75614712250357) < 1e-13
    assert abs(s.n0 - 1.5414940825367982) < 1e-13
    assert s.D0.value == 10.0
    s30 = shift_integrals(REFERENCE_BATH, 30.0)
    assert abs(s30.delta - -3.518972442317689) < 1e-10
    assert abs(s30.delta_plus - -8.28556703196597) < 1e-10
    assert abs(s30.delta_minus - -1.247622147330628) < 1e-10


def test_shifts_against_resolvent_ladder():
    # Delta = Re R(w0) - Re R(-w0), Delta_pm = 2 (Re R(0) - Re R(-+w0)) with R the
    # eps-regularised resolvent, extrapolated to eps = 0.
    eps = [5e-2 * k for k in EPSILON_LADDER]

    def re_r(x):
        return extrapolate_to_zero(eps, [epsilon_resolvent(REFERENCE_BATH, x, e).real for e in eps])

    r0, rp, rm = re_r(0.0), re_r(5.0), re_r(-5.0)
    assert abs((rp - rm) - DELTA_5) < 1e-9
    assert abs(2 * (r0 - rm) - DELTA_PLUS_5) < 1e-7
    assert abs(2 * (r0 - rp) - DELTA_MINUS_5) < 1e-7


def test_resolvent_against_riemann_sum():
    # Midpoint sum on [-5000, 5000] with h = 2.5e-4 = eps/4; aliasing ~ exp(-2 pi eps/h).
    x, eps, h = 5.0, 1e-3, 2.5e-4
    n = int(round(10000 / h))
    total = 0j
    for start in range(0, n, 4_000_000):
        k = np.arange(start, min(start + 4_000_000, n))
        w = -5000 + (k + 0.5) * h
        total += np.sum(bath_correlation(w, REFERENCE_BATH) / (x - w + 1j * eps))
    ref = total * h / (2 * math.pi)
    val = epsilon_resolvent(REFERENCE_BATH, x, eps)
    assert abs(val - ref) < 1e-8 * abs(ref)
    assert abs(val - (-16.03679476098475 - 6.043891680025174j)) < 1e-9


@settings(max_examples=15, deadline=None)
@given(x=st.one_of(st.floats(1.0, 200.0), st.floats(-200.0, -1.0)),
       T=st.floats(1.0, 30.0))
def test_plemelj(x, T):
    bath = BathParams(1.0, 1.0, 100.0, T)
    eps = [1e-3 * abs(x) * k for k in EPSILON_LADDER]
    vals = [epsilon_resolvent(bath, x, e) for e in eps]
    im = extrapolate_to_zero(eps, [v.imag for v in vals])
    # D(x) can be ~1e-9 of the integral itself; floor at quadrature accuracy
    floor = 1e-10 * abs(vals[-1])
    assert abs(im + bath_correlation(x, bath) / 2) < 1e-6 * bath_correlation(x, bath) + floor


def test_reflected_resolvent_imaginary_part():
    eps = [1e-2 * k for k in EPSILON_LADDER]
    im = extrapolate_to_zero(eps, [epsilon_resolvent(REFERENCE_BATH, 5.0, e, reflected=True).imag
                                   for e in eps])
    assert im == pytest.approx(-bath_correlation(-5.0, REFERENCE_BATH) / 2, rel=1e-6)


def test_extrapolation_exact_for_quadratics():
    eps = [1.0, 0.5, 0.1]
    vals = [3 - 2 * e + 7 * e**2 for e in eps]
    assert abs(extrapolate_to_zero(eps, vals) - 3) < 1e-13
    arr = extrapolate_to_zero(eps, [np.array([v, 2j * v]) for v in vals])
    assert np.allclose(arr, [3, 6j], atol=1e-12)
    with pytest.raises(ValueError):
        extrapolate_to_zero([1.0], [])


@settings(max_examples=20, deadline=None)
@given(w0=st.floats(0.3, 60.0), T=st.floats(0.5, 40.0), g=st.floats(0.1, 5.0),
       s=st.sampled_from([1.0, 1.5, 2.0, 3.0]), wc=st.floats(20.0, 300.0))
def test_shift_identity(w0, T, g, s, wc):
    sh = shift_integrals(BathParams(g, s, wc, T), w0)
    scale = abs(sh.delta_plus) + abs(sh.delta_minus)
    assert sh.identity_defect() <= 1e-10 * scale


def test_shift_scaling_with_strength():
    a = shift_integrals(BathParams(1.0, 1.0, 100.0, 10.0), 7.0)
    b = shift_integrals(BathParams(3.0, 1.0, 100.0, 10.0), 7.0)
    for k in ("delta", "delta_plus", "delta_minus"):
        assert getattr(b, k) == pytest.approx(3 * getattr(a, k), rel=1e-10)


@pytest.mark.parametrize("change", [dict(tail_cutoff_multiplier=100.0),
                                    dict(excision_halfwidth_factor=5e-4)])
def test_shift_stable_under_numerical_parameters(change):
    ref = shift_integrals(REFERENCE_BATH, 12.0)
    alt = shift_integrals(REFERENCE_BATH, 12.0, QuadratureConfig(**change))
    for k in ("delta", "delta_plus", "delta_minus"):
        assert abs(getattr(alt, k) - getattr(ref, k)) < 1e-10 * abs(getattr(ref, k))


def test_sub_ohmic_shifts():
    bath = BathParams(1.0, 0.5, 100.0, 10.0)
    assert math.isfinite(shift_delta(bath, 5.0))
    with pytest.raises(SubOhmicDivergenceError):
        shift_delta_pm(bath, 5.0)
    with pytest.raises(SubOhmicDivergenceError):
        shift_integrals(bath, 5.0)
    with pytest.raises(SubOhmicDivergenceError):
        epsilon_resolvent(bath, 0.0, 1e-2)


def test_shift_domain_errors():
    with pytest.raises(DomainError):
        shift_delta(REFERENCE_BATH, 0.0)
    with pytest.raises(DomainError):
        shift_delta(REFERENCE_BATH, 3000.0)
    with pytest.raises(DomainError):
        epsilon_resolvent(REFERENCE_BATH, 5.0, 0.0)
    with pytest.raises(DomainError):
        QuadratureConfig(rel_tol=0.0)


def test_quadrature_error_reports_state():
    cfg = QuadratureConfig(rel_tol=1e-15, abs_tol=1e-300, max_panels=20)
    with pytest.raises(QuadratureError) as info:
        shift_delta(REFERENCE_BATH, 5.0, cfg)
    assert info.value.panels > 20


@pytest.mark.parametrize("w0", [0.99999, 1.00001, 2.0, 4.0000001])
def test_pole_next_to_scale_grid(w0):
    # T = 1 puts grid points at 0.25 * 2^k; poles landing on or beside them
    sh = shift_integrals(BathParams(1.0, 1.0, 100.0, 1.0), w0)
    assert sh.identity_defect() <= 1e-10 * (abs(sh.delta_plus) + abs(sh.delta_minus))


def test_narrow_thermal_feature_is_resolved():
    # absorption branch exp(-|w|/T) is a narrow bump next to a wide domain
    bath = BathParams(1.0, 1.0, 51.0, 0.5)
    sh = shift_integrals(bath, 1.0)
    eps = [5e-3 * k for k in EPSILON_LADDER]

    def re_r(x):
        return extrapolate_to_zero(eps, [epsilon_resolvent(bath, x, e).real for e in eps])

    assert abs(sh.delta - (re_r(1.0) - re_r(-1.0))) < 1e-7
    assert sh.identity_defect() < 1e-12
