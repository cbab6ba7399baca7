# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Signatures mirror ``_fallback``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY

cnp.import_array()


cdef inline double _sqdist(const double[:, ::1] a, Py_ssize_t i,
                           const double[:, ::1] b, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t t
    cdef double diff = a[i, 0] - b[j, 0]
    cdef double acc = diff * diff
    for t in range(1, a.shape[1]):
        diff = a[i, t] - b[j, t]
        acc = acc + diff * diff
    return acc


cdef double _frechet_sq(const double[:, ::1] a, const double[:, ::1] b,
                        double[::1] prev, double[::1] cur) noexcept nogil:
    cdef Py_ssize_t n1 = a.shape[0], n2 = b.shape[0], i, j
    cdef double best, d
    prev[0] = _sqdist(a, 0, b, 0)
    for j in range(1, n2):
        d = _sqdist(a, 0, b, j)
        prev[j] = prev[j - 1] if prev[j - 1] > d else d
    for i in range(1, n1):
        d = _sqdist(a, i, b, 0)
        cur[0] = prev[0] if prev[0] > d else d
        for j in range(1, n2):
            best = prev[j]
            if prev[j - 1] < best:
                best = prev[j - 1]
            if cur[j - 1] < best:
                best = cur[j - 1]
            d = _sqdist(a, i, b, j)
            cur[j] = best if best > d else d
        for j in range(n2):
            prev[j] = cur[j]
    return prev[n2 - 1]


cdef double _directed_sq(const double[:, ::1] a, const double[:, ::1] b) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double worst = 0.0, near, d
    for i in range(a.shape[0]):
        near = INFINITY
        for j in range(b.shape[0]):
            d = _sqdist(a, i, b, j)
            if d < near:
                near = d
        if near > worst:
            worst = near
    return worst


def frechet_pair(a, b):
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef double[::1] prev = np.empty(bv.shape[0])
    cdef double[::1] cur = np.empty(bv.shape[0])
    return float(sqrt(_frechet_sq(av, bv, prev, cur)))


def hausdorff_pair(a, b):
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef double x = _directed_sq(av, bv)
    cdef double y = _directed_sq(bv, av)
    return float(sqrt(x if x > y else y))


def directed_hausdorff_pair(a, b):
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    return float(sqrt(_directed_sq(av, bv)))


def frechet_row(flat, offsets, Py_ssize_t q):
    cdef const double[:, ::1] fv = np.ascontiguousarray(flat, dtype=np.float64)
    cdef const cnp.int64_t[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef Py_ssize_t n = off.shape[0] - 1, i, longest = 0
    for i in range(n):
        if off[i + 1] - off[i] > longest:
            longest = off[i + 1] - off[i]
    cdef double[::1] prev = np.empty(longest)
    cdef double[::1] cur = np.empty(longest)
    out = np.empty(n)
    cdef double[::1] ov = out
    cdef const double[:, ::1] cq = fv[off[q]:off[q + 1]]
    with nogil:
        for i in range(n):
            ov[i] = sqrt(_frechet_sq(cq, fv[off[i]:off[i + 1]], prev, cur))
    return out


def hausdorff_row(flat, offsets, Py_ssize_t q):
    cdef const double[:, ::1] fv = np.ascontiguousarray(flat, dtype=np.float64)
    cdef const cnp.int64_t[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef Py_ssize_t n = off.shape[0] - 1, i
    cdef double x, y
    out = np.empty(n)
    cdef double[::1] ov = out
    cdef const double[:, ::1] cq = fv[off[q]:off[q + 1]]
    with nogil:
        for i in range(n):
            x = _directed_sq(cq, fv[off[i]:off[i + 1]])
            y = _directed_sq(fv[off[i]:off[i + 1]], cq)
            ov[i] = sqrt(x if x > y else y)
    return out


def swap_costs(cand_cost, weights, first, second, nearest, Py_ssize_t k):
    cdef const double[:, ::1] cc = np.ascontiguousarray(cand_cost, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[::1] f1 = np.ascontiguousarray(first, dtype=np.float64)
    cdef const double[::1] f2 = np.ascontiguousarray(second, dtype=np.float64)
    cdef const cnp.int64_t[::1] near = np.ascontiguousarray(nearest, dtype=np.int64)
    cdef Py_ssize_t nc = cc.shape[0], n = cc.shape[1], c, p, o
    out = np.zeros((nc, k))
    cdef double[:, ::1] ov = out
    cdef double d, m1, m2, base
    with nogil:
        for c in range(nc):
            base = 0.0
            for p in range(n):
                d = cc[c, p]
                m1 = d if d < f1[p] else f1[p]
                m2 = d if d < f2[p] else f2[p]
                base = base + w[p] * m1
                ov[c, near[p]] += w[p] * (m2 - m1)
            for o in range(k):
                ov[c, o] += base
    return out


def range_traces(dist_rows):
    cdef const double[:, ::1] dv = np.ascontiguousarray(dist_rows, dtype=np.float64)
    cdef Py_ssize_t nr = dv.shape[0], d = dv.shape[1], r, s, t
    if d == 0:
        return np.zeros(1, dtype=np.uint64)
    masks = np.zeros(nr * d + 1, dtype=np.uint64)
    cdef cnp.uint64_t[::1] mv = masks
    cdef cnp.uint64_t acc
    cdef double thr
    with nogil:
        for r in range(nr):
            for s in range(d):
                thr = dv[r, s]
                acc = 0
                for t in range(d):
                    if dv[r, t] >= thr:
                        acc = acc | ((<cnp.uint64_t>1) << t)
                mv[r * d + s] = acc
    return np.unique(masks)
