import math
import warnings

import numpy as np
import pytest
from scipy import special

from bpreduce import crossover as cx


# -- Airy functions ----------------------------------------------------------

def test_airy_matches_scipy():
    for s in np.linspace(-15, 15, 601):
        ai, aip, _, _ = special.airy(s)
        got_ai, got_aip = cx.airy_pair(float(s))
        assert abs(got_ai - ai) <= 1e-11 * max(1.0, abs(ai))
        assert abs(got_aip - aip) <= 1e-11 * max(1.0, abs(aip))
        if s > 0:
            assert got_ai == pytest.approx(ai, rel=1e-10)


def test_airy_values_at_origin():
    assert cx.airy(0.0) == pytest.approx(0.355028053887817239, rel=1e-15)
    assert cx.airy_prime(0.0) == pytest.approx(-0.258819403792806798, rel=1e-15)


def test_airy_ode_residual():
    # cell-averaged residual of Ai'' = s Ai: (Ai'(b) - Ai'(a) - int_a^b s Ai ds)/(b - a)
    x, w = np.polynomial.legendre.leggauss(12)
    edges = np.linspace(-10, 10, 401)
    worst = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        s = 0.5 * (b - a) * x + 0.5 * (a + b)
        integral = 0.5 * (b - a) * sum(wk * sk * cx.airy(float(sk)) for wk, sk in zip(w, s))
        worst = max(worst, abs(cx.airy_prime(b) - cx.airy_prime(a) - integral) / (b - a))
    assert worst <= 1e-9


def test_first_zero_two_ways():
    series = cx.first_airy_zero("series")
    integral = cx.first_airy_zero("integral")
    assert abs(series - integral) <= 1e-10
    assert series == pytest.approx(special.ai_zeros(1)[0][0], abs=1e-11)
    assert cx.A1_ZERO == series
    with pytest.raises(ValueError):
        cx.first_airy_zero("guess")


def test_airy_integral_representation():
    for s in (-3.0, -1.0, 0.0, 1.5):
        assert cx.airy_integral(s) == pytest.approx(special.airy(s)[0], abs=1e-11)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        cx.airy_integral(-2.4)


def test_airy_range_is_enforced():
    with pytest.raises(ValueError):
        cx.airy(15.5)
    with pytest.raises(ValueError):
        cx.airy_prime(-16.0)


def test_log_derivative_asymptotics():
    # both sides of the switch to the asymptotic ratio agree with scipy; just below
    # the switch Ai is ~1e-5 and the Maclaurin sum leaves ~1e-8 relative error
    for x, rel in ((1.0, 1e-12), (4.0, 1e-10), (5.9, 1e-7), (6.1, 1e-9), (12.0, 1e-13)):
        ai, aip, _, _ = special.airy(x)
        assert cx.airy_log_derivative(x) == pytest.approx(aip / ai, rel=rel)
    for x in (1e3, 1e6):
        assert cx.airy_log_derivative(x) == pytest.approx(-math.sqrt(x) - 1 / (4 * x), rel=1e-8)


# -- zero-dimensional integral -----------------------------------------------

def test_integral_at_zero_activity():
    for v in (1.0, 0.1, 1e-3):
        assert cx.yukawa0d_log_integral(0.0, v) == pytest.approx(0.0, abs=1e-11)


@pytest.mark.parametrize("v", [1.0, 0.5])
def test_taylor_coefficients_are_gaussian_moments(v):
    got = cx.taylor_coefficients(v, 5)
    want = cx.gaussian_moment_coefficients(v, 5)
    for g, w in zip(got, want):
        assert abs(g - w) <= 1e-9 * max(1.0, abs(w))


def test_laplace_asymptotics():
    v = 1e-4
    for z in (0.05, 0.2, 0.3):
        gap = cx.yukawa0d_log_integral(z, v) - cx.laplace_log_integral(z, v)
        assert abs(gap) < 1e-3
    # the next Laplace correction is O(v): shrinking v by 10 shrinks the gap by about 10
    z = 0.2
    g3 = cx.yukawa0d_log_integral(z, 1e-3) - cx.laplace_log_integral(z, 1e-3)
    g4 = cx.yukawa0d_log_integral(z, 1e-4) - cx.laplace_log_integral(z, 1e-4)
    assert 7 < g3 / g4 < 13


def test_log_integral_is_complex_past_sign_change():
    v = 1e-3
    z_past = cx.Z_C * (1 - cx.CrossoverPoint.from_s(-3.0, v).t)
    val = cx.yukawa0d_log_integral(z_past, v)
    assert isinstance(val, complex)
    assert isinstance(cx.yukawa0d_log_integral(0.1, v), float)


def test_contour_argument_checks():
    with pytest.raises(ValueError):
        cx.contour_integral(0.1, 0.0)
    with pytest.raises(ValueError):
        cx.contour_integral(0.1, 2.0)
    bad = cx.ContourSpec(kink=0.0, radius=0.5)
    with pytest.raises(cx.ContourError):
        cx.contour_integral(0.0, 0.5, bad)


def test_crossover_point():
    p = cx.CrossoverPoint.from_s(1.5, 1e-6)
    assert p.s == pytest.approx(1.5)
    assert p.z == pytest.approx(cx.Z_C * (1 - 1.5e-4))
    with pytest.raises(ValueError):
        cx.CrossoverPoint(0.0, 0.1)


# -- Green's function ----------------------------------------------------------

def test_doubling_nodes_is_stable():
    v = 1e-6
    for s in (-1.0, 0.0, 2.0):
        t = s * v ** (2 / 3)
        a = cx.g_bp_singular_numeric(t, v, nodes=24)
        b = cx.g_bp_singular_numeric(t, v, nodes=48)
        assert abs(a - b) <= 1e-8 * abs(a)


def test_critical_point_is_finite():
    for v in (1e-2, 1e-4, 1e-6):
        g = cx.g_bp_numeric(0.0, v)
        assert math.isfinite(g)
        # G(t=0) = e(1 + v^{1/3} b1 Ai'(0)/Ai(0)) + O(v^{2/3})
        assert g == pytest.approx(math.e + v ** (1 / 3) * cx.airy_scaling_F(0.0), abs=5 * v ** (2 / 3) + 1e-12)


def test_converges_to_meanfield_at_fixed_z():
    z = 0.3
    t = 1 - z / cx.Z_C
    target = cx.meanfield_limit(z)
    gaps = [abs(cx.g_bp_numeric(t, v) - target) for v in (1e-2, 1e-3, 1e-4, 1e-5)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-4
    # away from z_c the approach is analytic in v
    assert 5 < gaps[-2] / gaps[-1] < 20


def test_meanfield_examples():
    assert cx.meanfield_limit(cx.Z_C) == pytest.approx(math.e, rel=1e-15)
    assert cx.meanfield_limit(1e-6) == pytest.approx(1 + 1e-6, rel=1e-11)
    x = 0.5
    assert cx.meanfield_limit(x * math.exp(-x)) == pytest.approx(math.exp(x), rel=1e-14)
    with pytest.raises(ValueError):
        cx.meanfield_limit(0.5)
    with pytest.raises(ValueError):
        cx.meanfield_limit(0.0)


def test_meanfield_square_root_exponent():
    ts = np.logspace(-6, -3, 31)
    gaps = [math.e - cx.meanfield_limit(cx.Z_C * (1 - t)) for t in ts]
    assert cx.loglog_slope(ts, gaps) == pytest.approx(0.5, abs=0.01)


def test_scaling_function_pole_and_slope():
    with pytest.raises(ValueError):
        cx.airy_scaling_F(cx.A1_ZERO / cx.B1_THEORY)
    with pytest.raises(ValueError):
        cx.airy_scaling_F(-3.0)
    ss = np.logspace(2, 4, 31)
    assert cx.loglog_slope(ss, [cx.airy_scaling_F(s) for s in ss]) == pytest.approx(0.5, abs=0.02)
    # F < 0 for s > s_F and F(s) / (b0 b1^{3/2} sqrt(s)) -> -1
    big = 1e4
    assert cx.airy_scaling_F(big) / (cx.B0_THEORY * cx.B1_THEORY ** 1.5 * math.sqrt(big)) == pytest.approx(-1, rel=1e-4)


def test_scaling_form_is_v_one_third_times_F():
    for v in (1e-4, 1e-6):
        for s in (-1.0, 0.5, 2.0):
            t = s * v ** (2 / 3)
            assert cx.scaling_form(t, v) == pytest.approx(v ** (1 / 3) * cx.airy_scaling_F(s), rel=1e-12)
    b = (2.0, 1.1)
    assert cx.airy_scaling_F(1.0, *b) == pytest.approx(2.0 * 1.1 * cx.airy_log_derivative(1.1), rel=1e-14)


def test_unfitted_form_converges_like_v_one_third():
    s = 1.0
    errs = []
    for v in (1e-5, 1e-7):
        num = cx.g_bp_singular_numeric(s * v ** (2 / 3), v)
        errs.append(abs(num / (v ** (1 / 3) * cx.airy_scaling_F(s)) - 1))
    assert errs[1] < 0.01
    assert 3 < errs[0] / errs[1] < 7          # 100^{1/3} = 4.64


def test_fit_on_regular_window():
    s = np.array([-1.0, 0.0, 1.0, 2.0, 3.0])
    fit = cx.fit_constants(1e-6, s)
    assert fit["max_rel_residual"] < 0.01
    assert fit["b0"] == pytest.approx(cx.B0_THEORY, rel=0.05)
    assert fit["b1"] == pytest.approx(cx.B1_THEORY, rel=0.05)


def test_fit_ignores_points_past_the_pole():
    with pytest.raises(ValueError):
        cx.fit_constants(1e-6, [-3.0, -2.5, -2.0], numeric=[1.0, 1.0, 1.0])


def test_numeric_pole_approaches_airy_zero():
    poles = [cx.numeric_pole(v) for v in (1e-5, 1e-7)]
    target = cx.A1_ZERO / cx.B1_THEORY
    assert abs(poles[1] - target) < abs(poles[0] - target) < 5e-3
    assert abs(poles[1] - target) < 1e-3
