import math
import random
import warnings
from fractions import Fraction as Fr

import numpy as np
import pytest

from bpreduce.combinatorics import bareiss_det
from bpreduce.forest_root import (DualCoefficients, a_matrix, forest_sum, fundamental_theorem_check,
                                  gaussian_integral_exact, gaussian_localization_check,
                                  matrix_forest_identity)


def test_one_vertex():
    a = DualCoefficients(1, (Fr(3, 7),), {})
    assert matrix_forest_identity(a) == (Fr(3, 7), Fr(3, 7), True)


def test_two_vertices_by_hand():
    a1, a2, a12 = Fr(2), Fr(3), Fr(5)
    a = DualCoefficients(2, (a1, a2), {(1, 2): a12})
    expected = a1 * a2 + a12 * (a1 + a2)
    assert bareiss_det(a_matrix(a)) == expected
    assert forest_sum(a) == expected


def test_three_vertices_has_sixteen_terms():
    # with every weight equal to 1 the forest sum counts rooted forests: 4^2 = 16
    a = DualCoefficients(3, (1, 1, 1), {(1, 2): 1, (1, 3): 1, (2, 3): 1})
    assert forest_sum(a) == 16
    assert bareiss_det(a_matrix(a)) == 16


@pytest.mark.parametrize("n", range(1, 6))
def test_random_rational_identity(n):
    rng = random.Random(n)
    for _ in range(30):
        lhs, rhs, eq = matrix_forest_identity(DualCoefficients.random_rational(n, rng))
        assert eq and lhs == rhs


def test_missing_pairs_are_zero():
    a = DualCoefficients(3, (Fr(1), Fr(2), Fr(3)), {(1, 2): Fr(1, 2)})
    # vertex 3 is isolated: det factorizes
    assert matrix_forest_identity(a)[0] == 3 * (Fr(1) * 2 + Fr(1, 2) * 3)


def test_matrix_tree_consistency():
    # a_i -> 0 except vertex 1: forest sum is a_1 times the spanning-tree weight
    a = DualCoefficients(4, (1, 0, 0, 0), {(i, j): 1 for i in range(1, 5) for j in range(i + 1, 5)})
    assert forest_sum(a) == 16


def test_coefficient_validation():
    with pytest.raises(ValueError):
        DualCoefficients(2, (1,), {})
    with pytest.raises(ValueError):
        DualCoefficients(2, (1, 1), {(2, 1): 1})


def test_exact_gaussian_integral():
    rng = np.random.default_rng(0)
    for n in range(1, 6):
        assert gaussian_integral_exact(DualCoefficients.random_real(n, rng)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        gaussian_integral_exact(DualCoefficients(2, (-5.0, 1.0), {(1, 2): 0.1}))


def test_gaussian_localization_real_and_complex():
    rng = np.random.default_rng(4)
    a = DualCoefficients.random_real(3, rng)
    est = gaussian_localization_check(a, 50_000, seed=2)
    assert isinstance(est.mean, float) and est.pull(1.0) < 4
    c = DualCoefficients(2, (1 + 0.1j, 0.8 - 0.05j), {(1, 2): 0.5 + 0.02j})
    est_c = gaussian_localization_check(c, 50_000, seed=3)
    assert abs(est_c.mean - 1.0) / est_c.standard_error < 4


def test_gaussian_localization_is_deterministic():
    a = DualCoefficients.random_real(2, np.random.default_rng(1))
    assert gaussian_localization_check(a, 1000, 7) == gaussian_localization_check(a, 1000, 7)


def test_low_effective_sample_size_warns():
    a = DualCoefficients.random_real(4, np.random.default_rng(2))
    with pytest.warns(RuntimeWarning, match="effective sample size"):
        gaussian_localization_check(a, 2000, seed=1, inflation=0.02)


def test_non_positive_definite_real_part():
    with pytest.raises(ValueError):
        gaussian_localization_check(DualCoefficients(2, (-3.0, 1.0), {(1, 2): 0.5}), 100, 0)


def test_fundamental_theorem():
    ok = fundamental_theorem_check(lambda t: math.exp(-t), lambda t: -math.exp(-t))
    assert ok["status"] == "pass" and ok["error"] <= 1e-10
    g = fundamental_theorem_check(lambda t: 1 / (1 + t) ** 2, lambda t: -2 / (1 + t) ** 3)
    assert g["status"] == "pass"
    slow = fundamental_theorem_check(lambda t: 1 / (1 + t), lambda t: -1 / (1 + t) ** 2)
    assert slow["status"] == "divergent"
    wrong = fundamental_theorem_check(lambda t: math.exp(-t), lambda t: -2 * math.exp(-2 * t), tol=1e-10)
    assert wrong["status"] == "pass"  # f(0) = 1 = int 2e^{-2t}: only the integral matters
    bad = fundamental_theorem_check(lambda t: math.exp(-t), lambda t: -3 * math.exp(-t))
    assert bad["status"] == "fail"
