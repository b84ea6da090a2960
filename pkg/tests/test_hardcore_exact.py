import math
from dataclasses import replace
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from bpreduce.hardcore_exact import (GAS_TABLE, INV_E, POLYMER_TABLE, d0_identity_check, exponent_table_check,
                                     hardrod_logZ, hardrod_pressure, mayer_series, richardson_pressure,
                                     tree_function, tree_series, zbp_d2, zbp_d3)


def test_tree_function_special_points():
    assert tree_function(0.0).T == 0.0
    assert tree_function(INV_E).T == 1.0
    assert tree_function(math.exp(-1.0)).T == 1.0
    with pytest.raises(ValueError):
        tree_function(0.37)
    with pytest.raises(ValueError):
        tree_function(float("nan"))


def test_tree_function_residual_on_a_grid():
    for z in np.linspace(-50, INV_E, 3001):
        val = tree_function(float(z))
        assert val.residual <= 1e-13 * max(1.0, abs(z))
        assert val.T <= 1.0


def test_tree_function_near_branch_point():
    # reference T = -W_0(-z) at the same float z; dT/dz ~ 1/(1 - T) sets the tolerance
    for eps in (1e-15, 1e-12, 1e-8, 1e-4, 1e-2):
        z = INV_E * (1 - eps)
        with mpmath.workdps(40):
            ref = float(-mpmath.lambertw(-mpmath.mpf(z)).real)
        T = tree_function(z).T
        assert abs(T - ref) <= 1e-15 / (1 - ref)
        assert abs(T - (1 - math.sqrt(2 * eps))) <= eps + 1e-15 / (1 - ref)


@pytest.mark.parametrize("z", [-0.1, -0.03, 0.01, 0.05, 0.1])
def test_tree_series_agrees_inside_radius(z):
    assert tree_series(z, 40) == pytest.approx(tree_function(z).T, rel=1e-13)
    assert abs(tree_series(z, 20) - tree_function(z).T) <= 1e-10


def test_tree_function_is_increasing():
    zs = np.linspace(-3, INV_E, 500)
    ts = [tree_function(float(z)).T for z in zs]
    assert all(a < b for a, b in zip(ts, ts[1:]))


def test_hardrod_small_box_by_hand():
    # L = 2.5: Z = 1 + z*2.5 + z^2*1.5^2/2 + z^3*0.5^3/6
    z = 0.3
    exact = 1 + z * 2.5 + z**2 * 1.5**2 / 2 + z**3 * 0.5**3 / 6
    assert hardrod_logZ(z, 2.5) == pytest.approx(math.log(exact), rel=1e-14)
    assert hardrod_logZ(-z, 2.5) == pytest.approx(math.log(1 - z * 2.5 + z**2 * 1.125 - z**3 * 0.125 / 6),
                                                 rel=1e-13)


def test_hardrod_pressure_limit():
    for z in (0.05, 0.2, 1.0, 3.0):
        p = hardrod_pressure(z) if z < INV_E else -tree_function(-z).T
        assert abs(hardrod_logZ(z, 400.0) / 400.0 - p) < 2e-2
        assert abs(richardson_pressure(z) - p) < 1e-4


def test_hardrod_negative_activity():
    # inside the radius of convergence the alternating sum still converges to the pressure
    z = -0.2
    assert abs(richardson_pressure(z) - hardrod_pressure(z)) < 1e-4


def test_mayer_series_converges_to_pressure():
    z = 0.15
    assert mayer_series(z, 60) == pytest.approx(hardrod_pressure(z), rel=1e-12)
    with pytest.raises(ValueError):
        hardrod_pressure(0.5)
    with pytest.raises(ValueError):
        hardrod_logZ(0.1, 0.0)


def test_polymer_generating_functions():
    y = 0.01
    assert zbp_d2(y) == pytest.approx(sum((2 * math.pi) ** (n - 1) / n * y**n for n in range(1, 80)), rel=1e-13)
    d3 = sum((2 * math.pi) ** (n - 1) * n ** (n - 1) / math.factorial(n) * y**n for n in range(1, 80))
    assert zbp_d3(y) == pytest.approx(d3, rel=1e-12)


@pytest.mark.parametrize("z", [-0.9, -1e-8, 1e-8, 0.5, 10.0])
def test_d0_identity(z):
    r = d0_identity_check(z)
    assert r["rel_error"] <= 1e-14
    with pytest.raises(ValueError):
        d0_identity_check(-1.0)


def test_exponent_tables_consistent():
    res = exponent_table_check()
    assert res["passed"]
    assert res["checked"] > 0 and res["skipped"] > 0
    theta_rows = [r for r in res["relations"] if r["relation"] == "theta = 3 - gamma"]
    assert all(r["status"] == "pass" for r in theta_rows) and len(theta_rows) == 4


def test_corrupted_table_is_detected():
    bad_gas = (replace(GAS_TABLE[0], alpha=Fraction(5, 2)),) + GAS_TABLE[1:]
    res = exponent_table_check(bad_gas, POLYMER_TABLE)
    assert not res["passed"]
    failed = {r["relation"] for r in res["relations"] if r["status"] == "fail"}
    assert "gamma_BP = alpha_HC" in failed
