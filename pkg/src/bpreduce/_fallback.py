"""Pure-Python Redelmeier enumeration, the reference twin of ``_kernels.pyx``.

Same traversal order, same task partition and same results; integers are
Python ints so there is no overflow path.
"""

from __future__ import annotations

from typing import Iterator

from .combinatorics import bareiss_det


def _neighbour_offsets(dim: int) -> list[tuple[int, ...]]:
    offs = []
    for k in range(dim):
        for s in (1, -1):
            v = [0] * dim
            v[k] = s
            offs.append(tuple(v))
    return offs


def _allowed(p: tuple[int, ...]) -> bool:
    # lexicographically >= origin
    for x in p:
        if x > 0:
            return True
        if x < 0:
            return False
    return True


def _add(p, q):
    return tuple(a + b for a, b in zip(p, q))


def spanning_trees_of_sites(sites: list[tuple[int, ...]], offsets) -> int:
    n = len(sites)
    if n == 1:
        return 1
    index = {s: i for i, s in enumerate(sites)}
    m = n - 1
    lap = [[0] * m for _ in range(m)]
    for i in range(1, n):
        deg = 0
        for off in offsets:
            j = index.get(_add(sites[i], off))
            if j is not None:
                deg += 1
                if j > 0:
                    lap[i - 1][j - 1] = -1
        lap[i - 1][i - 1] = deg
    return bareiss_det(lap)


def _walk(dim: int, nmax: int, split_depth: int = 0, n_tasks: int = 1,
          task_index: int = 0, weigh: bool = True) -> Iterator[tuple[list, int]]:
    """Yield ``(sites, spanning_trees)`` for each animal owned by this task."""
    offsets = _neighbour_offsets(dim)
    origin = (0,) * dim
    seen = {origin}
    cells: list[tuple[int, ...]] = []
    counter = [0]
    split_depth = min(split_depth, nmax)

    def rec(untried: list):
        size = len(cells)
        for idx, c in enumerate(untried):
            cells.append(c)
            new = size + 1
            emit = True
            if new <= split_depth:
                emit = task_index == 0
            elif new == split_depth + 1:
                counter[0] += 1
                if (counter[0] - 1) % n_tasks != task_index:
                    cells.pop()
                    continue
            if emit:
                yield list(cells), (spanning_trees_of_sites(cells, offsets) if weigh else 0)
            if new < nmax:
                child = untried[idx + 1:]
                added = []
                for off in offsets:
                    nb = _add(c, off)
                    if nb not in seen and _allowed(nb):
                        seen.add(nb)
                        added.append(nb)
                child.extend(added)
                yield from rec(child)
                for nb in added:
                    seen.discard(nb)
            cells.pop()

    yield from rec([origin])


def count_animals(dim: int, nmax: int, split_depth: int = 0, n_tasks: int = 1,
                  task_index: int = 0):
    """Return ``(animal_counts, tree_weights)`` lists indexed by size 0..nmax."""
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    if n_tasks < 1 or not (0 <= task_index < n_tasks):
        raise ValueError("bad task partition")
    counts = [0] * (nmax + 1)
    trees = [0] * (nmax + 1)
    for sites, st in _walk(dim, nmax, split_depth, n_tasks, task_index):
        counts[len(sites)] += 1
        trees[len(sites)] += st
    return counts, trees


def iter_animals(dim: int, size: int) -> Iterator[list[tuple[int, ...]]]:
    """Yield the site lists of all fixed animals with exactly ``size`` sites."""
    for sites, _ in _walk(dim, size, weigh=False):
        if len(sites) == size:
            yield sites
