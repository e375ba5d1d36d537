# cython: language_level=3
"""Compiled twins of the kernels in ``_fallback``; same signatures and results."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, calloc, free

cnp.import_array()


def reuse_distances(ids, Py_ssize_t n_distinct):
    cdef const cnp.int64_t[::1] tr = np.ascontiguousarray(ids, dtype=np.int64)
    cdef Py_ssize_t n = tr.shape[0]
    out_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    cdef cnp.int64_t* tree = <cnp.int64_t*> calloc(n + 1, sizeof(cnp.int64_t))
    cdef cnp.int64_t* last = <cnp.int64_t*> malloc(max(n_distinct, 1) * sizeof(cnp.int64_t))
    if tree == NULL or last == NULL:
        free(tree)
        free(last)
        raise MemoryError()
    cdef Py_ssize_t t, i, p
    cdef cnp.int64_t e, s
    with nogil:
        for i in range(n_distinct):
            last[i] = -1
        for t in range(n):
            e = tr[t]
            p = last[e]
            if p >= 0:
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
    free(tree)
    free(last)
    return out_arr


def jacobi_sweep(const double[:, ::1] xy_in, double[:, ::1] xy_out,
                 const cnp.int64_t[::1] verts, const cnp.int64_t[::1] indptr,
                 const cnp.int64_t[::1] indices):
    cdef Py_ssize_t k, j, v, u, lo, hi
    cdef double sx, sy
    with nogil:
        for k in range(verts.shape[0]):
            v = verts[k]
            lo = indptr[v]
            hi = indptr[v + 1]
            sx = 0.0
            sy = 0.0
            for j in range(lo, hi):
                u = indices[j]
                sx = sx + xy_in[u, 0]
                sy = sy + xy_in[u, 1]
            xy_out[v, 0] = sx / <double>(hi - lo)
            xy_out[v, 1] = sy / <double>(hi - lo)


def gauss_seidel_sweep(double[:, ::1] xy, const cnp.int64_t[::1] verts,
                       const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices):
    cdef Py_ssize_t k, j, v, u, lo, hi
    cdef double sx, sy
    with nogil:
        for k in range(verts.shape[0]):
            v = verts[k]
            lo = indptr[v]
            hi = indptr[v + 1]
            sx = 0.0
            sy = 0.0
            for j in range(lo, hi):
                u = indices[j]
                sx = sx + xy[u, 0]
                sy = sy + xy[u, 1]
            xy[v, 0] = sx / <double>(hi - lo)
            xy[v, 1] = sy / <double>(hi - lo)
