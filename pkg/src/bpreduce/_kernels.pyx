# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Redelmeier enumeration of fixed site animals.

Each animal is weighted by the spanning-tree count of its nearest-neighbour
graph, computed with fraction-free elimination in checked 128-bit integers.
"""

from libc.stdlib cimport malloc, free, calloc
from libc.stdint cimport uint64_t, int64_t

cdef extern from "_int128.h" nogil:
    ctypedef long long bp_i128
    int bp_mul(bp_i128 a, bp_i128 b, bp_i128 *out)
    int bp_sub(bp_i128 a, bp_i128 b, bp_i128 *out)
    int bp_add(bp_i128 a, bp_i128 b, bp_i128 *out)
    uint64_t bp_lo(bp_i128 a)
    int64_t bp_hi(bp_i128 a)

DEF MAXN = 32
DEF MAXDIM = 3


cdef struct Lattice:
    int dim
    int nmax
    int ncells
    int nnb
    int nb[2 * MAXDIM]
    char *mark          # 0 free, 1 seen or forbidden
    int *pos            # index in current animal, -1 if absent
    int *cells          # current animal, by insertion order
    int *ubuf           # per-depth untried stacks, (nmax + 1) * ulen
    int ulen
    bp_i128 *lap        # (nmax - 1)^2 scratch
    bp_i128 *count
    bp_i128 *trees
    int split_depth
    long long n_tasks
    long long task_index
    long long branch_counter
    int overflow


cdef int _spanning(Lattice *L, int n, bp_i128 *out) noexcept nogil:
    """Spanning trees of the current n-site animal; returns 1 on overflow."""
    cdef int m = n - 1
    cdef int i, j, k, r, c, nbc, deg
    cdef bp_i128 pivot, prev, a, b, t
    cdef bp_i128 *A = L.lap
    if n == 1:
        out[0] = 1
        return 0
    for i in range(m * m):
        A[i] = 0
    # vertex 0 is dropped to form the Laplacian minor
    for i in range(1, n):
        c = L.cells[i]
        deg = 0
        for k in range(L.nnb):
            nbc = c + L.nb[k]
            j = L.pos[nbc]
            if j >= 0:
                deg += 1
                if j > 0:
                    A[(i - 1) * m + (j - 1)] = -1
        A[(i - 1) * m + (i - 1)] = deg
    prev = 1
    cdef int sign = 1
    for k in range(m - 1):
        if A[k * m + k] == 0:
            r = -1
            for i in range(k + 1, m):
                if A[i * m + k] != 0:
                    r = i
                    break
            if r < 0:
                out[0] = 0
                return 0
            for j in range(m):
                t = A[k * m + j]
                A[k * m + j] = A[r * m + j]
                A[r * m + j] = t
            sign = -sign
        pivot = A[k * m + k]
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                if bp_mul(A[i * m + j], pivot, &a):
                    return 1
                if bp_mul(A[i * m + k], A[k * m + j], &b):
                    return 1
                if bp_sub(a, b, &t):
                    return 1
                A[i * m + j] = t / prev
            A[i * m + k] = 0
        prev = pivot
    out[0] = A[(m - 1) * m + (m - 1)] * sign
    return 0


cdef void _record(Lattice *L, int size) noexcept nogil:
    cdef bp_i128 st = 0
    if L.overflow:
        return
    if _spanning(L, size, &st):
        L.overflow = 1
        return
    if bp_add(L.count[size], 1, &L.count[size]):
        L.overflow = 1
    if bp_add(L.trees[size], st, &L.trees[size]):
        L.overflow = 1


cdef void _search(Lattice *L, int depth, int nuntried) noexcept nogil:
    # untried cells for this level live in ubuf[depth * ulen : depth * ulen + nuntried]
    cdef int *untried = L.ubuf + depth * L.ulen
    cdef int *child
    cdef int idx, c, k, nbc, nchild, nadded, size
    size = depth
    for idx in range(nuntried):
        if L.overflow:
            return
        c = untried[idx]
        L.cells[size] = c
        L.pos[c] = size
        if size + 1 <= L.split_depth:
            # shallow prefix: every task walks it, only task 0 records it
            if L.task_index == 0:
                _record(L, size + 1)
        elif size + 1 == L.split_depth + 1:
            L.branch_counter += 1
            if (L.branch_counter - 1) % L.n_tasks != L.task_index:
                L.pos[c] = -1
                continue
            _record(L, size + 1)
        else:
            _record(L, size + 1)
        if size + 1 < L.nmax:
            child = L.ubuf + (depth + 1) * L.ulen
            nchild = 0
            for k in range(idx + 1, nuntried):
                child[nchild] = untried[k]
                nchild += 1
            nadded = 0
            for k in range(L.nnb):
                nbc = c + L.nb[k]
                if L.mark[nbc] == 0:
                    L.mark[nbc] = 1
                    child[nchild] = nbc
                    nchild += 1
                    nadded += 1
            _search(L, depth + 1, nchild)
            for k in range(nchild - nadded, nchild):
                L.mark[child[k]] = 0
        L.pos[c] = -1


cdef object _py_int(bp_i128 x):
    return (int(bp_hi(x)) << 64) + int(bp_lo(x))


def count_animals(int dim, int nmax, int split_depth=0, long long n_tasks=1,
                  long long task_index=0):
    """Return ``(animal_counts, tree_weights)`` lists indexed by size 0..nmax.

    Raises OverflowError if a 128-bit intermediate overflows; callers then
    fall back to the arbitrary-precision implementation.
    """
    if dim < 2 or dim > MAXDIM:
        raise ValueError("dim must be 2 or 3")
    if nmax < 1 or nmax >= MAXN:
        raise ValueError("nmax out of kernel range")
    if n_tasks < 1 or not (0 <= task_index < n_tasks):
        raise ValueError("bad task partition")
    cdef Lattice L
    cdef int w0 = nmax + 2, w = 2 * nmax + 1
    cdef int widths[MAXDIM]
    cdef int strides[MAXDIM]
    cdef int offs[MAXDIM]
    cdef int k, idx, rem, coord, allowed, ncells = 1, origin = 0
    cdef int coords[MAXDIM]
    widths[0] = w0
    offs[0] = 1
    for k in range(1, dim):
        widths[k] = w
        offs[k] = nmax
    for k in range(dim - 1, -1, -1):
        strides[k] = ncells
        ncells *= widths[k]
    L.dim = dim
    L.nmax = nmax
    L.ncells = ncells
    L.nnb = 2 * dim
    for k in range(dim):
        L.nb[2 * k] = strides[k]
        L.nb[2 * k + 1] = -strides[k]
    L.ulen = 2 * dim * nmax + 4
    L.mark = <char *>calloc(ncells, sizeof(char))
    L.pos = <int *>malloc(ncells * sizeof(int))
    L.cells = <int *>malloc((nmax + 1) * sizeof(int))
    L.ubuf = <int *>malloc((nmax + 2) * L.ulen * sizeof(int))
    L.lap = <bp_i128 *>malloc((nmax * nmax + 1) * sizeof(bp_i128))
    L.count = <bp_i128 *>calloc(nmax + 1, sizeof(bp_i128))
    L.trees = <bp_i128 *>calloc(nmax + 1, sizeof(bp_i128))
    if not (L.mark and L.pos and L.cells and L.ubuf and L.lap and L.count and L.trees):
        free(L.mark); free(L.pos); free(L.cells); free(L.ubuf)
        free(L.lap); free(L.count); free(L.trees)
        raise MemoryError()
    L.split_depth = split_depth if split_depth < nmax else nmax
    L.n_tasks = n_tasks
    L.task_index = task_index
    L.branch_counter = 0
    L.overflow = 0
    for idx in range(ncells):
        L.pos[idx] = -1
        rem = idx
        for k in range(dim):
            coords[k] = rem // strides[k] - offs[k]
            rem = rem % strides[k]
        # padding ring and lexicographically smaller cells are never placed
        allowed = 1
        for k in range(dim):
            if coords[k] == -offs[k] or coords[k] == widths[k] - offs[k] - 1:
                allowed = 0
        if allowed:
            for k in range(dim):
                if coords[k] > 0:
                    break
                if coords[k] < 0:
                    allowed = 0
                    break
        if not allowed:
            L.mark[idx] = 1
    for k in range(dim):
        origin += offs[k] * strides[k]
    L.mark[origin] = 1
    L.ubuf[0] = origin
    with nogil:
        _search(&L, 0, 1)
    overflow = L.overflow
    counts = [_py_int(L.count[k]) for k in range(nmax + 1)]
    trees = [_py_int(L.trees[k]) for k in range(nmax + 1)]
    free(L.mark); free(L.pos); free(L.cells); free(L.ubuf)
    free(L.lap); free(L.count); free(L.trees)
    if overflow:
        raise OverflowError("128-bit accumulator overflow")
    return counts, trees
