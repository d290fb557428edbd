# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the fixed-point edge sweeps and cautious rounds.

Mirrors _pykern exactly: same accumulation order, same eviction order,
same integer counts, so outputs are bit-identical across backends.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def goodness_sums(const cnp.int32_t[::1] src, const cnp.int32_t[::1] dst,
                  const cnp.float64_t[::1] weight, const cnp.float64_t[::1] fairness,
                  Py_ssize_t n):
    out_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.float64_t[::1] out = out_arr
    cdef Py_ssize_t i
    for i in range(src.shape[0]):
        out[dst[i]] += fairness[src[i]] * weight[i]
    return out_arr


def fairness_sums(const cnp.int32_t[::1] src, const cnp.int32_t[::1] dst,
                  const cnp.float64_t[::1] weight, const cnp.float64_t[::1] goodness,
                  Py_ssize_t n):
    out_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.float64_t[::1] out = out_arr
    cdef cnp.float64_t v
    cdef Py_ssize_t i
    for i in range(src.shape[0]):
        v = weight[i] * goodness[dst[i]]
        out[src[i]] += v if v >= 0 else -v
    return out_arr


def cautious_round(const cnp.int64_t[::1] indptr, const cnp.int32_t[::1] indices,
                   Py_ssize_t pivot, double delta, Py_ssize_t n):
    member_arr = np.zeros(n, dtype=bool)
    inside_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.uint8_t[::1] member = member_arr.view(np.uint8)
    cdef cnp.int64_t[::1] inside = inside_arr
    cdef Py_ssize_t i, j, u, x, csize
    cdef double lo, hi
    cdef bint found

    for j in range(indptr[pivot], indptr[pivot + 1]):
        member[indices[j]] = 1
    csize = 0
    for u in range(n):
        if member[u]:
            csize += 1
            for j in range(indptr[u], indptr[u + 1]):
                inside[indices[j]] += 1

    while csize > 0:
        lo = (1.0 - 3.0 * delta) * csize
        hi = 3.0 * delta * csize
        found = False
        for u in range(n):
            if member[u] and (inside[u] < lo or
                              (indptr[u + 1] - indptr[u]) - inside[u] > hi):
                x = u
                found = True
                break
        if not found:
            break
        member[x] = 0
        csize -= 1
        for j in range(indptr[x], indptr[x + 1]):
            inside[indices[j]] -= 1

    if csize > 0:
        lo = (1.0 - 7.0 * delta) * csize
        hi = 7.0 * delta * csize
        for u in range(n):
            if not member[u] and inside[u] >= lo and \
                    (indptr[u + 1] - indptr[u]) - inside[u] <= hi:
                member[u] = 1
    return member_arr
