import math

import numpy as np
import pytest

from bpreduce.scaling_functions import (K_HC_D1, ScalingFunction, fd_derivative, k_bp_d3, k_hc_d1,
                                        k_hc_d1_prime, k_transform, miller_check)


def test_analytic_derivative_matches_finite_difference():
    for x in np.linspace(0.1, 10, 50):
        assert fd_derivative(k_hc_d1, x) == pytest.approx(k_hc_d1_prime(x), rel=1e-9)


def test_transform_reproduces_closed_form():
    res = miller_check(np.linspace(0.1, 10.0, 991))
    assert res["analytic"]["sup_error"] <= 1e-12
    assert res["fd"]["sup_error"] <= 1e-8
    assert res["grid_points"] == 991


def test_transform_is_linear():
    other = ScalingFunction(lambda x: math.exp(-2 * x), lambda x: -2 * math.exp(-2 * x))
    combo = K_HC_D1.combine(2.0, other, -3.0)
    x = 1.7
    lhs = k_transform(combo, 1, -1, x)
    rhs = 2 * k_transform(K_HC_D1, 1, -1, x) - 3 * k_transform(other, 1, -1, x)
    assert lhs == pytest.approx(rhs, rel=1e-14)
    assert (K_HC_D1 + other)(x) == pytest.approx(k_hc_d1(x) + math.exp(-2 * x))


def test_derivative_dropped_when_unknown():
    plain = ScalingFunction(lambda x: x)
    combo = K_HC_D1 + plain
    assert combo.derivative is None
    with pytest.raises(ValueError):
        k_transform(combo, 1, -1, 1.0)
    assert k_transform(combo, 1, -1, 1.0, mode="fd") == pytest.approx(
        k_transform(K_HC_D1, 1, -1, 1.0) + (1.0 - (-2) * 1.0) / (4 * math.pi**2), rel=1e-9)


def test_domain_and_mode_errors():
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            k_hc_d1(bad)
        with pytest.raises(ValueError):
            k_bp_d3(bad)
    with pytest.raises(ValueError):
        k_transform(K_HC_D1, 1, -1, 1.0, mode="spectral")
    with pytest.raises(ValueError):
        miller_check([0.05, 1.0])
    with pytest.raises(ValueError):
        miller_check([])
