# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernels for sparse Hermite-chaos products and evaluation.

Same signatures and floating-point operation order as ``_pykernels``.
Multi-indices are packed into a 64-bit key in base ``N + 1``; the caller
guarantees ``(N + 1) ** m < 2 ** 63``.
"""
import numpy as np

from libc.stdint cimport uint64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

BACKEND = "compiled"


cdef inline void _emit(unordered_map[uint64_t, double]& acc, vector[uint64_t]& order,
                       uint64_t key, double w):
    if acc.count(key) == 0:
        order.push_back(key)
        acc[key] = w
    else:
        acc[key] += w


cdef _unpack(unordered_map[uint64_t, double]& acc, vector[uint64_t]& order,
             Py_ssize_t m, uint64_t base):
    cdef Py_ssize_t n = order.size(), r, i
    cdef uint64_t key
    idx_arr = np.empty((n, m), dtype=np.int32)
    c_arr = np.empty(n, dtype=np.float64)
    cdef int[:, ::1] idx = idx_arr
    cdef double[::1] c = c_arr
    for r in range(n):
        key = order[r]
        c[r] = acc[key]
        for i in range(m):
            idx[r, i] = <int>(key % base)
            key //= base
    return idx_arr, c_arr


def linearized_product(const int[:, ::1] ia, const double[::1] ca,
                       const int[:, ::1] ib, const double[::1] cb,
                       int N, const double[:, :, ::1] table):
    cdef Py_ssize_t na = ia.shape[0], nb = ib.shape[0], m = ia.shape[1]
    cdef Py_ssize_t p, q, i
    cdef int a, b, g, nd, lo
    cdef uint64_t base = N + 1
    cdef bint truncated = False
    cdef unordered_map[uint64_t, double] acc
    cdef vector[uint64_t] order
    cdef vector[int] floor_ = vector[int](m + 1)
    cdef vector[int] deg = vector[int](m + 1)
    cdef vector[int] jcur = vector[int](m + 1)
    cdef vector[double] w = vector[double](m + 1)
    cdef vector[uint64_t] key = vector[uint64_t](m + 1)
    cdef vector[uint64_t] pw = vector[uint64_t](m + 1)
    pw[0] = 1
    for i in range(1, m + 1):
        pw[i] = pw[i - 1] * base

    for p in range(na):
        for q in range(nb):
            floor_[m] = 0
            for i in range(m - 1, -1, -1):
                a = ia[p, i] - ib[q, i]
                floor_[i] = floor_[i + 1] + (a if a >= 0 else -a)
            if floor_[0] > N:
                truncated = True
                continue
            i = 0
            deg[0] = 0
            w[0] = ca[p] * cb[q]
            key[0] = 0
            jcur[0] = -1
            while i >= 0:
                jcur[i] += 1
                a = ia[p, i]
                b = ib[q, i]
                lo = a if a < b else b
                if jcur[i] > lo:
                    i -= 1
                    continue
                g = a + b - 2 * jcur[i]
                nd = deg[i] + g
                if nd + floor_[i + 1] > N:
                    truncated = True
                    continue
                if i == m - 1:
                    _emit(acc, order, key[i] + <uint64_t>g * pw[i],
                          w[i] * table[a, b, jcur[i]])
                else:
                    deg[i + 1] = nd
                    w[i + 1] = w[i] * table[a, b, jcur[i]]
                    key[i + 1] = key[i] + <uint64_t>g * pw[i]
                    jcur[i + 1] = -1
                    i += 1

    idx, c = _unpack(acc, order, m, base)
    return idx, c, bool(truncated)


def wick_product(const int[:, ::1] ia, const double[::1] ca,
                 const int[:, ::1] ib, const double[::1] cb, int N):
    cdef Py_ssize_t na = ia.shape[0], nb = ib.shape[0], m = ia.shape[1]
    cdef Py_ssize_t p, q, i
    cdef uint64_t base = N + 1
    cdef uint64_t k
    cdef bint truncated = False
    cdef unordered_map[uint64_t, double] acc
    cdef vector[uint64_t] order
    cdef vector[int] da = vector[int](na)
    cdef vector[int] db = vector[int](nb)
    cdef vector[uint64_t] ka = vector[uint64_t](na)
    cdef vector[uint64_t] kb = vector[uint64_t](nb)
    cdef uint64_t pw
    for p in range(na):
        pw = 1
        for i in range(m):
            da[p] += ia[p, i]
            ka[p] += <uint64_t>ia[p, i] * pw
            pw *= base
    for q in range(nb):
        pw = 1
        for i in range(m):
            db[q] += ib[q, i]
            kb[q] += <uint64_t>ib[q, i] * pw
            pw *= base
    for p in range(na):
        for q in range(nb):
            if da[p] + db[q] > N:
                truncated = True
                continue
            # no per-mode carry: every entry of the sum is <= N < base
            _emit(acc, order, ka[p] + kb[q], ca[p] * cb[q])
    idx, c = _unpack(acc, order, m, base)
    return idx, c, bool(truncated)


def evaluate(const int[:, ::1] idx, const double[::1] coeffs, xi_in, int N):
    xi_arr = np.ascontiguousarray(xi_in, dtype=np.float64)
    cdef const double[:, ::1] xi = xi_arr
    cdef Py_ssize_t S = xi.shape[0], m = xi.shape[1], nt = idx.shape[0]
    cdef Py_ssize_t s, i, k, t
    cdef double x, v, total
    cdef vector[double] h = vector[double](m * (N + 1))
    out_arr = np.empty(S, dtype=np.float64)
    cdef double[::1] out = out_arr
    for s in range(S):
        for i in range(m):
            x = xi[s, i]
            h[i * (N + 1)] = 1.0
            if N >= 1:
                h[i * (N + 1) + 1] = x
            for k in range(1, N):
                h[i * (N + 1) + k + 1] = x * h[i * (N + 1) + k] - (<double>k) * h[i * (N + 1) + k - 1]
        total = 0.0
        for t in range(nt):
            v = coeffs[t]
            for i in range(m):
                if idx[t, i]:
                    v *= h[i * (N + 1) + idx[t, i]]
            total += v
        out[s] = total
    return out_arr
