import math
from fractions import Fraction

import numpy as np
import pytest

from bpreduce.series_analysis import (TABLE_THETA, SeriesCoefficients, exact_continuum_series,
                                      lattice_theta_estimate, ratio_estimate, theta_gamma_relation)


def _pure(mu, theta, nmax):
    return SeriesCoefficients(tuple(n * math.log(mu) - theta * math.log(n) for n in range(1, nmax + 1)))


def test_pure_ansatz_is_recovered_exactly():
    mu, theta, diag = ratio_estimate(_pure(3.7, 1.3, 25), order=1)
    assert mu == pytest.approx(3.7, rel=1e-12)
    assert theta == pytest.approx(1.3, abs=1e-10)
    assert max(abs(r) for r in diag["residuals"]) < 1e-12


def test_correction_terms_are_absorbed_by_higher_order():
    # c_N = mu^N N^-theta (1 + 2/N): each extra power of x_N removes one order of the bias
    logs = tuple(n * math.log(2.0) - 1.5 * math.log(n) + math.log1p(2.0 / n) for n in range(1, 41))
    s = SeriesCoefficients(logs)
    errs = [abs(ratio_estimate(s, order=o, n_min=5)[1] - 1.5) for o in (1, 2, 3)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.02


@pytest.mark.parametrize("d,mu,theta,tol", [(2, 2 * math.pi, 1.0, 0.01), (3, 2 * math.pi * math.e, 1.5, 0.02)])
def test_exact_continuum_series(d, mu, theta, tol):
    m, th, diag = ratio_estimate(exact_continuum_series(d, 40))
    assert th == pytest.approx(theta, abs=tol)
    assert m == pytest.approx(mu, rel=1e-3)
    lo, hi = diag["theta_band"]
    assert lo <= th <= hi
    assert diag["mu_stability"] < 1e-3


def test_exact_series_values():
    s2 = exact_continuum_series(2, 5).values
    assert s2 == pytest.approx([(2 * math.pi) ** (n - 1) / n for n in range(1, 6)], rel=1e-13)
    s3 = exact_continuum_series(3, 5).values
    assert s3[2] == pytest.approx((2 * math.pi) ** 2 * 9 / 6, rel=1e-13)
    with pytest.raises(ValueError):
        exact_continuum_series(4, 10)
    with pytest.raises(ValueError):
        exact_continuum_series(2, 61)


def test_invariances():
    base = exact_continuum_series(3, 30)
    mu, th, _ = ratio_estimate(base)
    mu_s, th_s, _ = ratio_estimate(base.scaled(17.0))
    assert (mu_s, th_s) == pytest.approx((mu, th), rel=1e-12)
    mu_r, th_r, _ = ratio_estimate(base.reweighted(0.25))
    assert mu_r == pytest.approx(0.25 * mu, rel=1e-12)
    assert th_r == pytest.approx(th, abs=1e-9)


def test_from_values_handles_big_integers():
    vals = [10**k + 1 for k in range(0, 400, 40)]
    s = SeriesCoefficients.from_values(vals)
    assert s.exact == tuple(vals)
    assert s.log_values[-1] == pytest.approx(360 * math.log(10), rel=1e-12)
    assert SeriesCoefficients.from_values([1.0, 2.0, 3.0]).exact is None


def test_validation():
    with pytest.raises(ValueError):
        ratio_estimate(_pure(2, 1, 5))
    with pytest.raises(ValueError):
        SeriesCoefficients.from_values([1, 0, 3])
    with pytest.raises(ValueError):
        SeriesCoefficients.from_values([1.0, -2.0])
    with pytest.raises(ValueError):
        SeriesCoefficients((0.0, math.inf))
    with pytest.raises(ValueError):
        SeriesCoefficients((0.0,), source="lattice-d7")
    with pytest.raises(ValueError):
        ratio_estimate(_pure(2, 1, 8), order=6)


def test_plot_data_shape():
    _, _, diag = ratio_estimate(_pure(2.0, 1.0, 12))
    plot = diag["plot"]
    assert len(plot["inv_N"]) == len(plot["r_N"]) == len(plot["fit"]) == 11
    assert plot["inv_N"][0] == pytest.approx(0.5)


def test_theta_gamma_relation():
    assert theta_gamma_relation(Fraction(2)) == 1
    assert theta_gamma_relation(Fraction(3, 2)) == Fraction(3, 2)
    assert theta_gamma_relation("7/6") == Fraction(11, 6)
    assert theta_gamma_relation(Fraction(1, 2)) == Fraction(5, 2)
    assert TABLE_THETA[2] == theta_gamma_relation(2)


def test_lattice_estimate_within_gate():
    rep = lattice_theta_estimate(2, 12, threads=4)
    assert rep["passed"]
    assert abs(rep["theta"] - 1.0) <= 0.3
    lo, hi = rep["sensitivity_theta_band"]
    assert lo <= rep["theta"] <= hi
    assert rep["coefficients"][:4] == [1, 2, 6, 22]
    assert 4.5 < rep["mu"] < 6.0
