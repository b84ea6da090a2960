"""Labeled trees, rooted forests and spanning-tree counts.

Vertices are 1-based throughout. Trees are produced from Prüfer sequences in
lexicographic order, so iteration is deterministic and needs no storage of the
full set.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

TREE_LIMIT = 9
FOREST_LIMIT = 7

Edge = tuple[int, int]


class LimitExceeded(ValueError):
    """Requested size is above the configured enumeration bound."""


def _edge(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class LabeledTree:
    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a tree needs at least one vertex")
        if len(self.edges) != self.n - 1:
            raise ValueError(f"tree on {self.n} vertices needs {self.n - 1} edges")
        for i, j in self.edges:
            if not (1 <= i < j <= self.n):
                raise ValueError(f"bad edge {(i, j)}")
        if _count_components(self.n, self.edges) != 1:
            raise ValueError("edges do not form a connected acyclic graph")

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n + 1)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def parent_order(self, root: int = 1) -> tuple[list[int], list[int]]:
        """BFS order from ``root`` and the parent of each vertex (0 for root)."""
        adj = self.adjacency()
        parent = [0] * (self.n + 1)
        order = [root]
        seen = {root}
        for u in order:
            for w in sorted(adj[u]):
                if w not in seen:
                    seen.add(w)
                    parent[w] = u
                    order.append(w)
        return order, parent

    def non_edges(self) -> list[Edge]:
        es = set(self.edges)
        return [p for p in itertools.combinations(range(1, self.n + 1), 2) if p not in es]


@dataclass(frozen=True)
class ForestRootPair:
    n: int
    forest_edges: frozenset[Edge]
    roots: frozenset[int]

    def __post_init__(self):
        comps = _components(self.n, self.forest_edges)
        if comps is None:
            raise ValueError("forest edges contain a cycle")
        for comp in comps:
            if len(comp & self.roots) != 1:
                raise ValueError("each tree of the forest needs exactly one root")


@dataclass(frozen=True)
class SimpleGraph:
    n: int
    edges: frozenset[Edge]

    def __post_init__(self):
        for i, j in self.edges:
            if i == j:
                raise ValueError("self-loops are not allowed")
            if not (1 <= i < j <= self.n):
                raise ValueError(f"edge {(i, j)} must be normalized with 1 <= i < j <= n")

    @classmethod
    def from_edges(cls, n: int, edges) -> "SimpleGraph":
        return cls(n, frozenset(_edge(i, j) for i, j in edges))

    def has_edge(self, i: int, j: int) -> bool:
        return _edge(i, j) in self.edges

    def is_connected(self) -> bool:
        return self.n >= 1 and len(_components(self.n, self.edges, allow_cycles=True)) == 1


def _components(n: int, edges, allow_cycles: bool = False) -> list[set[int]] | None:
    """Connected components; None when ``edges`` contain a cycle unless ``allow_cycles``."""
    parent = list(range(n + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in edges:
        ri, rj = find(i), find(j)
        if ri == rj:
            if allow_cycles:
                continue
            return None
        parent[ri] = rj
    groups: dict[int, set[int]] = {}
    for v in range(1, n + 1):
        groups.setdefault(find(v), set()).add(v)
    return list(groups.values())


def _count_components(n: int, edges) -> int:
    comps = _components(n, edges)
    return 0 if comps is None else len(comps)


# -- Prüfer codes -----------------------------------------------------------

def prufer_decode(seq: Sequence[int], n: int) -> LabeledTree:
    if n == 1:
        return LabeledTree(1, ())
    if len(seq) != n - 2:
        raise ValueError(f"Prüfer sequence for n={n} has length {n - 2}")
    degree = [1] * (n + 1)
    for s in seq:
        degree[s] += 1
    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for s in seq:
        leaf = heapq.heappop(leaves)
        edges.append(_edge(leaf, s))
        degree[s] -= 1
        if degree[s] == 1:
            heapq.heappush(leaves, s)
    u, w = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append(_edge(u, w))
    return LabeledTree(n, tuple(sorted(edges)))


def prufer_encode(tree: LabeledTree) -> tuple[int, ...]:
    n = tree.n
    if n <= 2:
        return ()
    adj = [set(a) for a in tree.adjacency()]
    leaves = [v for v in range(1, n + 1) if len(adj[v]) == 1]
    heapq.heapify(leaves)
    seq = []
    for _ in range(n - 2):
        leaf = heapq.heappop(leaves)
        (nb,) = adj[leaf]
        seq.append(nb)
        adj[nb].discard(leaf)
        adj[leaf].clear()
        if len(adj[nb]) == 1:
            heapq.heappush(leaves, nb)
    return tuple(seq)


def enumerate_labeled_trees(n: int, limit: int = TREE_LIMIT) -> Iterator[LabeledTree]:
    """Yield every labeled tree on ``{1..n}`` once, in Prüfer-lexicographic order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > limit:
        raise LimitExceeded(
            f"tree enumeration refused: n={n} exceeds limit {limit} "
            f"({n}^{n - 2} trees)"
        )
    if n == 1:
        yield LabeledTree(1, ())
        return
    for seq in itertools.product(range(1, n + 1), repeat=n - 2):
        yield prufer_decode(seq, n)


def enumerate_forest_root_pairs(n: int, limit: int = FOREST_LIMIT) -> Iterator[ForestRootPair]:
    """Yield every rooted spanning forest of the complete graph on ``{1..n}`` once.

    Rooted forests on ``n`` vertices are in bijection with trees on ``{0..n}``:
    the neighbours of the extra vertex 0 are the roots.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > limit:
        raise LimitExceeded(f"forest-root enumeration refused: n={n} exceeds limit {limit}")
    for seq in itertools.product(range(0, n + 1), repeat=n - 1):
        # shift labels by one so the Prüfer decoder sees {1..n+1}; label 1 is the virtual root
        tree = prufer_decode([s + 1 for s in seq], n + 1)
        roots = []
        forest = []
        for i, j in tree.edges:
            if i == 1:
                roots.append(j - 1)
            else:
                forest.append((i - 1, j - 1))
        yield ForestRootPair(n, frozenset(forest), frozenset(roots))


# -- exact determinants -----------------------------------------------------

def bareiss_det(matrix) -> int:
    """Determinant of a square matrix over an exact ring (ints or Fractions).

    Fraction-free Bareiss elimination; every division is exact.
    """
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            row_i = m[i]
            row_k = m[k]
            for j in range(k + 1, n):
                val = row_i[j] * pivot - mik * row_k[j]
                row_i[j] = val // prev if isinstance(val, int) else val / prev
            row_i[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def laplacian(g: SimpleGraph) -> list[list[int]]:
    lap = [[0] * g.n for _ in range(g.n)]
    for i, j in g.edges:
        a, b = i - 1, j - 1
        lap[a][b] -= 1
        lap[b][a] -= 1
        lap[a][a] += 1
        lap[b][b] += 1
    return lap


def spanning_tree_count(g: SimpleGraph) -> int:
    """Exact spanning-tree count via the Laplacian minor (Matrix-Tree theorem)."""
    if g.n == 0 or not g.is_connected():
        return 0
    if g.n == 1:
        return 1
    lap = laplacian(g)
    minor = [row[1:] for row in lap[1:]]
    return bareiss_det(minor)
