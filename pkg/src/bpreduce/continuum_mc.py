"""Monte-Carlo configuration integrals for continuum branched polymers.

For a tree ``T`` on ``N`` vertices the tree constraints are exhausted by
sampling each edge vector independently (uniform on the unit sphere for hard
cores, from the normalized radial edge density for soft potentials); the
estimator is the average of the non-tree factors. Random streams are keyed by
``(seed, tree index, block index)`` and block sums are merged in block order,
so results do not depend on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from .combinatorics import LabeledTree, enumerate_labeled_trees

BLOCK = 1 << 16
TAB_NODES = 1024
TAB_TOL = 1e-10


class ConfigurationError(ValueError):
    pass


def rng_for(seed: int, stream: int, block: int) -> np.random.Generator:
    """Counter-based generator for one ``(seed, stream, block)`` triple."""
    ss = np.random.SeedSequence(seed, spawn_key=(stream, block))
    return np.random.Generator(np.random.Philox(ss))


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere in R^d."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    standard_error: float
    sample_count: int
    seed: int

    def pull(self, target: float) -> float:
        dev = abs(self.mean - target)
        if self.standard_error == 0:
            # exact (sample-free) estimates still carry quadrature rounding
            return 0.0 if dev <= 1e-12 * max(1.0, abs(target)) else math.inf
        return dev / self.standard_error

    @property
    def relative_error(self) -> float:
        return self.standard_error / abs(self.mean) if self.mean else math.inf


@dataclass(frozen=True)
class Embedding:
    dim: int
    positions: np.ndarray  # (N, dim), row 0 is the origin


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """Hard core ``U(t) = theta(t - 1)`` or soft ``U(t) = exp(-beta v(t))``, t = |y|^2."""

    kind: str
    beta: float = 0.0
    v: Callable[[np.ndarray], np.ndarray] | None = None
    v_prime: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("hard", "soft"):
            raise ConfigurationError(f"unknown potential kind {self.kind!r}")
        if self.kind == "soft" and (self.v is None or self.v_prime is None):
            raise ConfigurationError("a soft potential needs v and v_prime")

    @classmethod
    def hard(cls) -> "PotentialSpec":
        return cls("hard", name="hard")

    @classmethod
    def soft(cls, name: str, beta: float) -> "PotentialSpec":
        try:
            v, vp = SOFT_POTENTIALS[name]
        except KeyError:
            raise ConfigurationError(f"unknown soft potential {name!r}; known: {sorted(SOFT_POTENTIALS)}")
        return cls("soft", float(beta), v, vp, name)

    @property
    def q(self) -> float:
        """Single-site pair factor ``U(0)``."""
        if self.kind == "hard":
            return 0.0
        return math.exp(-self.beta * float(self.v(np.array(0.0))))

    def U(self, t):
        if self.kind == "hard":
            return (t >= 1.0).astype(float)
        return np.exp(-self.beta * self.v(t))

    def edge_density(self, t):
        """``2 U'(t) = -2 beta v'(t) exp(-beta v(t))`` for soft potentials."""
        return -2.0 * self.beta * self.v_prime(t) * np.exp(-self.beta * self.v(t))


SOFT_POTENTIALS: dict[str, tuple[Callable, Callable]] = {
    "exp": (lambda t: np.exp(-t), lambda t: -np.exp(-t)),
    "inv2": (lambda t: (1.0 + t) ** -2.0, lambda t: -2.0 * (1.0 + t) ** -3.0),
    "gauss2": (lambda t: np.exp(-(t**2)), lambda t: -2.0 * t * np.exp(-(t**2))),
}


def edge_normalization(potential: PotentialSpec, d: int) -> float:
    """``int_{R^d} 2U'(|y|^2) d^d y`` by adaptive radial quadrature."""
    if potential.kind != "soft":
        raise ConfigurationError("edge normalization is defined for soft potentials")
    if potential.beta == 0:
        return 0.0
    f = lambda r: r ** (d - 1) * float(potential.edge_density(np.array(r * r)))
    val, err = integrate.quad(f, 0.0, np.inf, limit=400, epsabs=0.0, epsrel=1e-12)
    if not math.isfinite(val) or val < 0 or err > 1e-6 * max(abs(val), 1e-300):
        raise ConfigurationError("edge density is not normalizable")
    return sphere_area(d) * val


class RadialSampler:
    """Inverse-CDF sampler for edge lengths with density ``r^{d-1} 2U'(r^2)``.

    The CDF is tabulated at ``TAB_NODES`` nodes uniform in the warped variable
    ``x = r/(1+r)``, truncated where the tail mass drops below ``TAB_TOL``, and
    inverted with a monotone cubic in ``r^d`` (linear near the origin).
    """

    def __init__(self, potential: PotentialSpec, d: int):
        if potential.kind != "soft":
            raise ConfigurationError("radial sampling is for soft potentials")
        self.d = d
        self.potential = potential
        dens = lambda r: r ** (d - 1) * float(potential.edge_density(np.array(r * r)))
        total, _ = integrate.quad(dens, 0.0, np.inf, limit=400, epsrel=1e-12, epsabs=0.0)
        if not (math.isfinite(total) and total > 0):
            raise ConfigurationError("edge density is not normalizable")
        R = 1.0
        while integrate.quad(dens, R, np.inf, limit=200)[0] > TAB_TOL * total:
            R *= 1.5
            if R > 1e8:
                raise ConfigurationError("edge density tail too heavy to tabulate")
        xmax = R / (1.0 + R)
        xs = np.linspace(0.0, xmax, TAB_NODES)
        rs = xs / (1.0 - xs)
        pieces = [integrate.quad(dens, a, b, limit=100, epsabs=1e-15, epsrel=1e-12)[0]
                  for a, b in zip(rs[:-1], rs[1:])]
        cdf = np.concatenate([[0.0], np.cumsum(pieces)])
        cdf /= cdf[-1]
        keep = np.concatenate([[True], np.diff(cdf) > 0])
        self._inverse = PchipInterpolator(cdf[keep], rs[keep] ** d)
        self.r_max = R

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        u = rng.random(shape)
        rho = np.clip(self._inverse(u), 0.0, None)
        return rho ** (1.0 / self.d)


@dataclass
class _TreePlan:
    tree: LabeledTree
    order: list[int]
    parent: list[int]
    non_tree: np.ndarray = field(default=None)  # (K, 2), 0-based

    @classmethod
    def of(cls, tree: LabeledTree) -> "_TreePlan":
        order, parent = tree.parent_order(1)
        nt = np.array([(i - 1, j - 1) for i, j in tree.non_edges()], dtype=int).reshape(-1, 2)
        return cls(tree, order, parent, nt)


def _unit_vectors(rng, m, k, d):
    g = rng.standard_normal((m, k, d))
    return g / np.linalg.norm(g, axis=2, keepdims=True)


def _positions(plan: _TreePlan, steps: np.ndarray) -> np.ndarray:
    m, _, d = steps.shape
    n = plan.tree.n
    pos = np.zeros((m, n, d))
    for k, v in enumerate(plan.order[1:]):
        pos[:, v - 1] = pos[:, plan.parent[v] - 1] + steps[:, k]
    return pos


def _edge_steps(rng, m, n, d, potential, sampler):
    steps = _unit_vectors(rng, m, n - 1, d)
    if potential.kind == "soft":
        steps = steps * sampler.sample(rng, (m, n - 1))[..., None]
    return steps


def _non_tree_t(plan, pos):
    if len(plan.non_tree) == 0:
        return np.zeros((pos.shape[0], 0))
    diff = pos[:, plan.non_tree[:, 0]] - pos[:, plan.non_tree[:, 1]]
    return np.einsum("mkd,mkd->mk", diff, diff)


def sample_tree_embedding(tree: LabeledTree, d: int, potential: PotentialSpec,
                          rng: np.random.Generator, sampler: RadialSampler | None = None):
    """Draw one embedding from the tree-edge measure; the returned weight is 1."""
    if d < 2:
        raise ConfigurationError("embedding dimension must be >= 2")
    if potential.kind == "soft" and sampler is None:
        sampler = RadialSampler(potential, d)
    plan = _TreePlan.of(tree)
    if tree.n == 1:
        return Embedding(d, np.zeros((1, d))), 1.0
    steps = _edge_steps(rng, 1, tree.n, d, potential, sampler)
    return Embedding(d, _positions(plan, steps)[0]), 1.0


def _block_moments(plan, d, potential, sampler, seed, stream, block, m):
    """Sum and sum of squares of the non-tree factor over one block."""
    rng = rng_for(seed, stream, block)
    steps = _edge_steps(rng, m, plan.tree.n, d, potential, sampler)
    t = _non_tree_t(plan, _positions(plan, steps))
    if potential.kind == "hard":
        w = np.all(t >= 1.0, axis=1).astype(float)
    else:
        w = np.exp(-potential.beta * potential.v(t).sum(axis=1))
    return float(w.sum()), float((w * w).sum())


def _tree_average(plan, d, potential, samples, seed, stream, sampler=None, threads=1) -> McEstimate:
    if samples < 2:
        raise ValueError("need at least 2 samples")
    if len(plan.non_tree) == 0:
        return McEstimate(1.0, 0.0, samples, seed)
    sizes = [min(BLOCK, samples - k) for k in range(0, samples, BLOCK)]
    jobs = [(b, m) for b, m in enumerate(sizes)]

    def run(job):
        b, m = job
        return _block_moments(plan, d, potential, sampler, seed, stream, b, m)

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0) * samples / (samples - 1)
    return McEstimate(mean, math.sqrt(var / samples), samples, seed)


def nonoverlap_probability(tree: LabeledTree, d: int, samples: int, seed: int,
                           stream: int = 0, threads: int = 1) -> McEstimate:
    """Probability that non-bonded hard spheres do not overlap under the tree measure."""
    return _tree_average(_TreePlan.of(tree), d, PotentialSpec.hard(), samples, seed, stream,
                         threads=threads)


def exact_continuum_coefficient(d: int, n: int) -> float | None:
    if d == 2:
        return (2 * math.pi) ** (n - 1) / n
    if d == 3:
        return (2 * math.pi) ** (n - 1) * n ** (n - 1) / math.factorial(n)
    return None


def _combine(n, estimates, edge_weight, seed, samples):
    scale = edge_weight ** (n - 1) / math.factorial(n)
    mean = scale * math.fsum(e.mean for e in estimates)
    se = scale * math.sqrt(math.fsum(e.standard_error**2 for e in estimates))
    return McEstimate(mean, se, samples, seed)


def continuum_coefficient(d: int, n: int, samples: int, seed: int, threads: int = 1) -> McEstimate:
    """Hard-core coefficient ``a_N = S_{d-1}^{N-1}/N! * sum_T P_T``; ``samples`` is per tree."""
    if n == 1:
        return McEstimate(1.0, 0.0, samples, seed)
    ests = [nonoverlap_probability(t, d, samples, seed, stream=k, threads=threads)
            for k, t in enumerate(enumerate_labeled_trees(n))]
    return _combine(n, ests, sphere_area(d), seed, samples)


def tree_probability_sum(d: int, n: int, samples: int, seed: int, threads: int = 1) -> McEstimate:
    """``sum_T P_T`` with combined standard error."""
    ests = [nonoverlap_probability(t, d, samples, seed, stream=k, threads=threads)
            for k, t in enumerate(enumerate_labeled_trees(n))]
    return McEstimate(math.fsum(e.mean for e in ests),
                      math.sqrt(math.fsum(e.standard_error**2 for e in ests)), samples, seed)


def soft_coefficient(d: int, n: int, potential: PotentialSpec, samples: int, seed: int,
                     threads: int = 1) -> McEstimate:
    """Soft-polymer coefficient ``W^{N-1}/N! * sum_T E_T[prod_{ij not in T} U_ij]``."""
    if potential.kind == "hard":
        return continuum_coefficient(d, n, samples, seed, threads)
    if n == 1:
        return McEstimate(1.0, 0.0, samples, seed)
    W = edge_normalization(potential, d)
    if W == 0:
        return McEstimate(0.0, 0.0, samples, seed)
    sampler = RadialSampler(potential, d)
    ests = [_tree_average(_TreePlan.of(t), d, potential, samples, seed, k, sampler, threads)
            for k, t in enumerate(enumerate_labeled_trees(n))]
    return _combine(n, ests, W, seed, samples)


# -- zero-dimensional gas ----------------------------------------------------

def log_series(coeffs: list[float]) -> list[float]:
    """Power-series coefficients of ``log f`` for ``f = sum coeffs[k] z^k`` with ``coeffs[0] = 1``."""
    if coeffs[0] != 1:
        raise ValueError("series must start with 1")
    n = len(coeffs)
    out = [0.0] * n
    for k in range(1, n):
        acc = k * coeffs[k] - math.fsum(j * out[j] * coeffs[k - j] for j in range(1, k))
        out[k] = acc / k
    return out


def d0_gas_coefficients(q: float, nmax: int) -> list[float]:
    """Polymer coefficients ``a_1..a_nmax`` implied by the zero-dimensional gas.

    ``log sum_N z^N q^{N(N-1)/2}/N! = -2 pi Z_BP(-z/2pi)`` gives
    ``a_N = (-1)^{N+1} (2 pi)^{N-1} [z^N] log Z``.
    """
    f = [q ** (k * (k - 1) / 2) / math.factorial(k) for k in range(nmax + 1)]
    ell = log_series(f)
    return [(-1) ** (k + 1) * (2 * math.pi) ** (k - 1) * ell[k] for k in range(1, nmax + 1)]


def dimensional_reduction_check_d0(potential: PotentialSpec, nmax: int, samples: int, seed: int,
                                   threads: int = 1) -> list[dict]:
    """Two-dimensional polymer coefficients against the zero-dimensional gas."""
    targets = d0_gas_coefficients(potential.q, nmax)
    rows = []
    for n in range(1, nmax + 1):
        est = soft_coefficient(2, n, potential, samples, seed, threads)
        rows.append({
            "N": n,
            "estimate": est.mean,
            "stderr": est.standard_error,
            "target": targets[n - 1],
            "pull": est.pull(targets[n - 1]),
        })
    return rows
