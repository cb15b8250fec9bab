# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled rank-search kernels: batch binary search over the sample
table, with optional bin narrowing and log-space interpolation."""

from libc.math cimport INFINITY, log2, pow

BACKEND = "compiled"


cdef inline Py_ssize_t _bisect_left(const double[::1] a, double x,
                                    Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline Py_ssize_t _bisect_right(const double[::1] a, double x,
                                     Py_ssize_t hi) noexcept nogil:
    cdef Py_ssize_t lo = 0
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if x < a[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo


cdef inline double _rank_at(const double[::1] neglogs, const double[::1] cumranks,
                            double q, Py_ssize_t j, Py_ssize_t n,
                            bint interpolate) noexcept nogil:
    cdef double c0, c1, x0, x1, frac, level, rank
    if j == 0:
        return 0.0
    c0 = cumranks[j - 1]
    if not interpolate or j >= n or q == INFINITY:
        return c0
    x0 = neglogs[j - 1]
    x1 = neglogs[j]
    c1 = cumranks[j]
    frac = (q - x0) / (x1 - x0)
    level = log2(c0) + frac * (log2(c1) - log2(c0))
    rank = pow(2.0, level)
    if rank < c0:
        rank = c0
    if rank > c1:
        rank = c1
    return rank


def estimate_plain(const double[::1] neglogs, const double[::1] cumranks,
                   const double[::1] queries, double[::1] out, bint interpolate):
    cdef Py_ssize_t n = neglogs.shape[0]
    cdef Py_ssize_t m = queries.shape[0]
    cdef Py_ssize_t k, j
    cdef double q
    with nogil:
        for k in range(m):
            q = queries[k]
            j = _bisect_left(neglogs, q, 0, n)
            out[k] = _rank_at(neglogs, cumranks, q, j, n, interpolate)


def estimate_binned(const double[::1] neglogs, const double[::1] cumranks,
                    const double[::1] queries, double[::1] out, bint interpolate,
                    const Py_ssize_t[::1] lo, const Py_ssize_t[::1] hi,
                    const double[::1] taus, double inv_width, Py_ssize_t nbins):
    cdef Py_ssize_t n = neglogs.shape[0]
    cdef Py_ssize_t m = queries.shape[0]
    cdef Py_ssize_t last = nbins - 1
    cdef Py_ssize_t k, j, b
    cdef double q
    cdef double tau_last = 0.0
    cdef bint uniform = inv_width > 0.0
    if nbins > 1:
        tau_last = taus[nbins - 2]
    with nogil:
        for k in range(m):
            q = queries[k]
            if nbins == 1:
                b = 0
            elif uniform:
                if q >= tau_last:
                    b = last
                else:
                    # truncation equals floor for the nonnegative q here
                    b = <Py_ssize_t>(q * inv_width)
                    if b > last:
                        b = last
            else:
                b = _bisect_right(taus, q, last)
            j = _bisect_left(neglogs, q, lo[b], hi[b])
            out[k] = _rank_at(neglogs, cumranks, q, j, n, interpolate)
