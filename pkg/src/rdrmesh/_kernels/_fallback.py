"""Pure-Python / numpy kernels. Always available; used when the compiled
extension is missing or ``RDRMESH_PURE_PYTHON=1``."""
import numpy as np


def reuse_distances(ids, n_distinct):
    """LRU stack distances for a trace of dense ids in ``0..n_distinct-1``.

    Fenwick tree over access times; a 1 marks the latest access of some
    element, so the distance is the count of marks strictly between the
    previous and the current access. First accesses get -1.
    """
    ids = np.asarray(ids, dtype=np.int64).tolist()
    n = len(ids)
    tree = [0] * (n + 1)
    last = [-1] * n_distinct
    out = [-1] * n
    for t, e in enumerate(ids):
        p = last[e]
        if p >= 0:
            # marks in (p, t) = prefix(t) - prefix(p + 1)
            s = 0
            i = t
            while i > 0:
                s += tree[i]
                i &= i - 1
            i = p + 1
            while i > 0:
                s -= tree[i]
                i &= i - 1
            out[t] = s
            i = p + 1
            while i <= n:
                tree[i] -= 1
                i += i & -i
        i = t + 1
        while i <= n:
            tree[i] += 1
            i += i & -i
        last[e] = t
    return np.asarray(out, dtype=np.int64)


def jacobi_sweep(xy_in, xy_out, verts, indptr, indices):
    """xy_out[v] = mean of xy_in over neighbours of v, for v in verts.

    Neighbours are added slot by slot, left to right, so the rounding
    matches the compiled loop exactly.
    """
    if len(verts) == 0:
        return
    starts = indptr[verts]
    counts = indptr[verts + 1] - starts
    sums = np.zeros((len(verts), 2))
    for j in range(int(counts.max())):
        live = np.flatnonzero(counts > j)
        sums[live] += xy_in[indices[starts[live] + j]]
    xy_out[verts] = sums / counts[:, None]


def gauss_seidel_sweep(xy, verts, indptr, indices):
    """In-place sweep: each update sees the ones before it."""
    ptr = indptr.tolist()
    nbr = indices.tolist()
    for v in verts.tolist():
        sx = sy = 0.0
        row = nbr[ptr[v]:ptr[v + 1]]
        for u in row:
            sx += xy[u, 0]
            sy += xy[u, 1]
        xy[v, 0] = sx / len(row)
        xy[v, 1] = sy / len(row)
