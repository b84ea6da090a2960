"""Forest-Root checks on the exponential family.

For ``f(t) = exp(-a.t)`` every rooted-forest term integrates in closed form and the
formula becomes the matrix-forest identity

    det A = sum over rooted forests (F, R) of prod_{ij in F} a_ij * prod_{r in R} a_r

with ``A_ij = -a_ij`` and ``A_ii = a_i + sum_j a_ij``. The Gaussian integral
``pi^-N det A * int exp(-<w, A wbar>) = 1`` is checked by importance sampling.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate

from .combinatorics import FOREST_LIMIT, bareiss_det, enumerate_forest_root_pairs
from .continuum_mc import McEstimate, rng_for


@dataclass(frozen=True)
class DualCoefficients:
    n: int
    vertex: tuple                 # a_1..a_n
    pair: dict                    # {(i, j): a_ij} for 1 <= i < j <= n; missing means 0

    def __post_init__(self):
        if len(self.vertex) != self.n:
            raise ValueError("need one vertex coefficient per vertex")
        for i, j in self.pair:
            if not (1 <= i < j <= self.n):
                raise ValueError(f"bad pair {(i, j)}")

    def a_pair(self, i: int, j: int):
        if i > j:
            i, j = j, i
        return self.pair.get((i, j), 0)

    @classmethod
    def random_rational(cls, n: int, rng: random.Random, max_den: int = 9, max_num: int = 20):
        def q():
            return Fraction(rng.randint(1, max_num), rng.randint(1, max_den))

        return cls(n, tuple(q() for _ in range(n)),
                   {(i, j): q() for i in range(1, n + 1) for j in range(i + 1, n + 1)})

    @classmethod
    def random_real(cls, n: int, rng: np.random.Generator, low: float = 0.2, high: float = 2.0):
        vert = tuple(float(x) for x in rng.uniform(low, high, n))
        pair = {(i, j): float(rng.uniform(low, high)) for i in range(1, n + 1) for j in range(i + 1, n + 1)}
        return cls(n, vert, pair)


def a_matrix(a: DualCoefficients) -> list[list]:
    n = a.n
    A = [[0] * n for _ in range(n)]
    for i in range(1, n + 1):
        diag = a.vertex[i - 1]
        for j in range(1, n + 1):
            if j != i:
                aij = a.a_pair(i, j)
                A[i - 1][j - 1] = -aij
                diag = diag + aij
        A[i - 1][i - 1] = diag
    return A


def _common_denominator(a: DualCoefficients) -> int:
    den = 1
    for x in list(a.vertex) + list(a.pair.values()):
        den = math.lcm(den, Fraction(x).denominator)
    return den


@lru_cache(maxsize=None)
def _forest_index_table(n: int, limit: int) -> tuple[tuple[int, ...], ...]:
    """Each rooted forest as indices into ``[a_1..a_n, a_12, a_13, ..., a_{n-1,n}]``."""
    pair_index = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            pair_index[(i, j)] = n + len(pair_index)
    table = []
    for fr in enumerate_forest_root_pairs(n, limit):
        idx = [pair_index[tuple(sorted(e))] for e in fr.forest_edges]
        idx += [r - 1 for r in fr.roots]
        table.append(tuple(idx))
    return tuple(table)


def forest_sum(a: DualCoefficients, limit: int = FOREST_LIMIT):
    """``sum_{(F,R)} prod_{ij in F} a_ij prod_{r in R} a_r`` over all rooted forests."""
    n = a.n
    weights = list(a.vertex) + [a.a_pair(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    total = 0
    for idx in _forest_index_table(n, limit):
        total += math.prod([weights[k] for k in idx])
    return total


def matrix_forest_identity(a: DualCoefficients) -> tuple[Fraction, Fraction, bool]:
    """``(det A, rooted-forest sum, equal?)`` in exact rational arithmetic.

    Both sides are homogeneous of degree ``n``, so coefficients are scaled to
    integers by their common denominator and the comparison is done in ints.
    """
    den = _common_denominator(a)
    scaled = DualCoefficients(
        a.n,
        tuple(int(Fraction(x) * den) for x in a.vertex),
        {k: int(Fraction(v) * den) for k, v in a.pair.items()},
    )
    lhs = bareiss_det(a_matrix(scaled))
    rhs = forest_sum(scaled)
    scale = den**a.n
    return Fraction(lhs, scale), Fraction(rhs, scale), lhs == rhs


# -- Gaussian localization ---------------------------------------------------

def _complex_matrix(a: DualCoefficients) -> np.ndarray:
    return np.array(a_matrix(a), dtype=complex)


def gaussian_integral_exact(a: DualCoefficients) -> float:
    """Closed-form ``pi^-N det A * int exp(-<w, A wbar>)`` for real A (expected 1).

    The integral factorizes into two real Gaussians, each ``pi^{N/2}/sqrt(det A)``,
    evaluated here through a Cholesky factor rather than the determinant.
    """
    A = np.array(a_matrix(a), dtype=float)
    try:
        chol = np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise ValueError("A is not positive definite") from exc
    n = a.n
    log_int = n * math.log(math.pi) - 2.0 * float(np.sum(np.log(np.diag(chol))))
    sign, logdet = np.linalg.slogdet(A)
    return float(sign * math.exp(logdet - n * math.log(math.pi) + log_int))


def gaussian_localization_check(a: DualCoefficients, samples: int, seed: int,
                                inflation: float = 0.5, block: int = 1 << 16) -> McEstimate:
    """Importance-sampling estimate of ``pi^-N det A * int exp(-<w, A wbar>) d^N x d^N y``.

    Samples are drawn from ``exp(-c <w, Re(A) wbar>)`` with ``c = inflation``; the
    weight ``exp(-<w, (A - c Re A) wbar>)`` is complex when A is. Writing
    ``w = x + i y`` with symmetric A gives ``<w, A wbar> = x^T A x + y^T A y``.
    """
    A = _complex_matrix(a)
    B = A.real
    try:
        np.linalg.cholesky(B)
    except np.linalg.LinAlgError as exc:
        raise ValueError("real part of A must be positive definite") from exc
    n = a.n
    Bref = inflation * B
    M = A - Bref
    # x ~ N(0, (2 Bref)^-1)
    cov_chol = np.linalg.cholesky(np.linalg.inv(2.0 * Bref))
    prefactor = np.linalg.det(A) / np.linalg.det(Bref)
    s1 = 0j
    s2 = 0.0
    abs1 = 0.0
    done = 0
    bi = 0
    while done < samples:
        m = min(block, samples - done)
        rng = rng_for(seed, 0, bi)
        g = rng.standard_normal((2, m, n))
        xy = g @ cov_chol.T
        q = np.einsum("kmi,ij,kmj->m", xy, M, xy)
        w = prefactor * np.exp(-q)
        s1 += complex(np.sum(w))
        s2 += float(np.sum(np.abs(w) ** 2))
        abs1 += float(np.sum(np.abs(w)))
        done += m
        bi += 1
    mean = s1 / samples
    var = max(s2 / samples - abs(mean) ** 2, 0.0)
    se = math.sqrt(var / max(samples - 1, 1))
    ess = abs1**2 / s2 if s2 > 0 else 0.0
    if ess < 0.1 * samples:
        warnings.warn(f"effective sample size {ess:.0f} is below 10% of {samples}", RuntimeWarning)
    if not np.any(A.imag):
        mean = mean.real
    return McEstimate(mean, se, samples, seed)


# -- one-variable case -------------------------------------------------------

def fundamental_theorem_check(f: Callable[[float], float], fprime: Callable[[float], float],
                              tol: float = 1e-10) -> dict:
    """Compare ``f(0)`` with ``-int_0^inf f'(t) dt``."""
    tail = abs(f(1e6))
    if not math.isfinite(tail) or tail > 1e-8:
        return {"f0": f(0.0), "integral": None, "status": "divergent", "error": math.inf}
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, est = integrate.quad(fprime, 0.0, np.inf, epsabs=1e-13, epsrel=1e-13, limit=400)
        except integrate.IntegrationWarning:
            return {"f0": f(0.0), "integral": None, "status": "divergent", "error": math.inf}
    f0 = f(0.0)
    err = abs(f0 + val)
    return {"f0": f0, "integral": -val, "quad_estimate": est, "error": err,
            "status": "pass" if err <= tol else "fail"}
