"""Exact lattice branched-polymer counts on Z^2 and Z^3.

A branched polymer with ``N`` vertices, counted modulo translations, is a fixed
site animal together with a spanning tree of its nearest-neighbour graph, so

    c_N = sum over fixed N-site animals A of tau(A)

where ``tau`` counts spanning trees. Summing the labeled-tree/embedding form
instead produces every such pair ``N!`` times; :func:`brute_force_cN` does
exactly that and is kept as an independent check.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

from . import kernels
from ._fallback import iter_animals
from .combinatorics import enumerate_labeled_trees

DEFAULT_BUDGET = {2: 12, 3: 9}
N_TASKS = 64


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class SiteAnimal:
    dim: int
    sites: frozenset[tuple[int, ...]]

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if not self.sites:
            raise ValueError("an animal has at least one site")
        if min(self.sites) != (0,) * self.dim:
            raise ValueError("sites must be canonically translated (least site at origin)")
        if not _connected(self.sites):
            raise ValueError("sites are not nearest-neighbour connected")

    @classmethod
    def canonical(cls, dim: int, sites) -> "SiteAnimal":
        sites = [tuple(s) for s in sites]
        base = min(sites)
        return cls(dim, frozenset(tuple(a - b for a, b in zip(s, base)) for s in sites))

    def __len__(self) -> int:
        return len(self.sites)


@dataclass(frozen=True)
class LatticeSeries:
    dim: int
    coefficients: tuple[int, ...]
    animal_counts: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.coefficients and self.coefficients[0] != 1:
            raise ValueError("c_1 must be 1")
        if any(c < 1 for c in self.coefficients):
            raise ValueError("lattice coefficients are positive")


def _connected(sites) -> bool:
    sites = set(sites)
    start = next(iter(sites))
    seen = {start}
    stack = [start]
    while stack:
        p = stack.pop()
        for k in range(len(p)):
            for s in (1, -1):
                q = p[:k] + (p[k] + s,) + p[k + 1:]
                if q in sites and q not in seen:
                    seen.add(q)
                    stack.append(q)
    return len(seen) == len(sites)


def _check_budget(dim: int, n: int, budget: int | None):
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    if n < 1:
        raise ValueError("N must be >= 1")
    limit = DEFAULT_BUDGET[dim] if budget is None else budget
    if n > limit:
        raise BudgetExceeded(f"N={n} exceeds the enumeration budget {limit} for dim={dim}")


def enumerate_fixed_animals(dim: int, n: int, budget: int | None = None) -> Iterator[SiteAnimal]:
    """Yield each translation class of connected ``n``-site subsets once."""
    _check_budget(dim, n, budget)
    for sites in iter_animals(dim, n):
        yield SiteAnimal(dim, frozenset(sites))


def _split_depth(nmax: int) -> int:
    # deep enough to give every task real work, shallow enough to be cheap to rewalk
    return max(0, min(4, nmax - 3))


def count_series(dim: int, nmax: int, threads: int = 1, budget: int | None = None,
                 backend: str | None = None) -> tuple[list[int], list[int]]:
    """Animal counts and c_N for sizes 1..nmax.

    The enumeration tree is split after a fixed prefix depth into ``N_TASKS``
    interleaved tasks; totals are exact integer sums, so the result does not
    depend on ``threads``.
    """
    _check_budget(dim, nmax, budget)
    depth = _split_depth(nmax)
    n_tasks = N_TASKS if depth > 0 else 1

    def task(i):
        return kernels.count_animals(dim, nmax, depth, n_tasks, i, backend=backend)

    if threads > 1 and n_tasks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(task, range(n_tasks)))
    else:
        parts = [task(i) for i in range(n_tasks)]
    counts = [0] * (nmax + 1)
    trees = [0] * (nmax + 1)
    for cs, ts in parts:
        for k in range(nmax + 1):
            counts[k] += cs[k]
            trees[k] += ts[k]
    return counts[1:], trees[1:]


def lattice_cN(dim: int, n: int, threads: int = 1, budget: int | None = None) -> int:
    return count_series(dim, n, threads, budget)[1][n - 1]


def lattice_series(dim: int, nmax: int, threads: int = 1, budget: int | None = None,
                   backend: str | None = None) -> LatticeSeries:
    counts, trees = count_series(dim, nmax, threads, budget, backend)
    return LatticeSeries(dim, tuple(trees), tuple(counts))


# -- oracles ----------------------------------------------------------------

def brute_force_cN(dim: int, n: int) -> int:
    """Sum over labeled trees and embeddings with y_1 = 0, divided by N!.

    Edges must map to unit lattice steps and distinct vertices to distinct
    sites. Feasible for N <= 6 in Z^2 and N <= 5 in Z^3.
    """
    steps = []
    for k in range(dim):
        for s in (1, -1):
            v = [0] * dim
            v[k] = s
            steps.append(tuple(v))
    total = 0
    for tree in enumerate_labeled_trees(n):
        order, parent = tree.parent_order(1)
        for choice in itertools.product(steps, repeat=n - 1):
            pos = {1: (0,) * dim}
            for v, step in zip(order[1:], choice):
                p = pos[parent[v]]
                pos[v] = tuple(a + b for a, b in zip(p, step))
            if len(set(pos.values())) == n:
                total += 1
    q, r = divmod(total, math.factorial(n))
    if r:
        raise AssertionError("embedding count not divisible by N!")
    return q


def naive_animal_count(dim: int, n: int, box: int = 5) -> int:
    """Count translation classes of connected n-subsets of a box by brute force."""
    pts = list(itertools.product(range(box), repeat=dim))
    classes = set()
    for sub in itertools.combinations(pts, n):
        if _connected(sub):
            base = min(sub)
            classes.add(frozenset(tuple(a - b for a, b in zip(s, base)) for s in sub))
    return len(classes)
