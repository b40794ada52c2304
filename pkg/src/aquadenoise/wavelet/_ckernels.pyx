# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled periodic filter-bank kernels.

Both kernels operate along the last axis of a C-contiguous 2D float64 array
and accumulate taps in ascending order, matching ``_pykernels`` bit for bit.
"""

import numpy as np


def analysis(const double[:, ::1] x, const double[::1] lo, const double[::1] hi):
    cdef Py_ssize_t rows = x.shape[0]
    cdef Py_ssize_t n = x.shape[1]
    cdef Py_ssize_t half = n // 2
    cdef Py_ssize_t taps = lo.shape[0]
    cdef Py_ssize_t i, k, t, j
    cdef double sa, sd, v

    approx = np.empty((rows, half), dtype=np.float64)
    detail = np.empty((rows, half), dtype=np.float64)
    cdef double[:, ::1] a = approx
    cdef double[:, ::1] d = detail

    with nogil:
        for i in range(rows):
            for k in range(half):
                sa = 0.0
                sd = 0.0
                for t in range(taps):
                    j = (2 * k + t) % n
                    v = x[i, j]
                    sa = sa + lo[t] * v
                    sd = sd + hi[t] * v
                a[i, k] = sa
                d[i, k] = sd
    return approx, detail


def synthesis(const double[:, ::1] approx, const double[:, ::1] detail,
              const double[::1] lo, const double[::1] hi):
    cdef Py_ssize_t rows = approx.shape[0]
    cdef Py_ssize_t half = approx.shape[1]
    cdef Py_ssize_t n = 2 * half
    cdef Py_ssize_t taps = lo.shape[0]
    cdef Py_ssize_t i, k, t, j

    result = np.zeros((rows, n), dtype=np.float64)
    cdef double[:, ::1] out = result

    with nogil:
        for i in range(rows):
            for t in range(taps):
                for k in range(half):
                    j = (2 * k + t) % n
                    out[i, j] = out[i, j] + (lo[t] * approx[i, k] + hi[t] * detail[i, k])
    return result
