# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops.

Every routine performs the same floating-point operations in the same order
as its twin in ``_pykernels`` so the two backends agree bit for bit.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()


def walsh_hadamard(double[::1] w):
    """In-place unnormalized Walsh-Hadamard transform of a length-2**n array."""
    cdef Py_ssize_t size = w.shape[0]
    cdef Py_ssize_t h = 1
    cdef Py_ssize_t i, j
    cdef double a, b
    while h < size:
        i = 0
        while i < size:
            for j in range(i, i + h):
                a = w[j]
                b = w[j + h]
                w[j] = a + b
                w[j + h] = a - b
            i += 2 * h
        h *= 2
    return np.asarray(w)


def evaluate_batch(const long long[:, ::1] keys, const double[::1] coeffs,
                   const double[:, ::1] x):
    """Sum over keys of ``coeff * prod(x[:, key])`` for every row of ``x``."""
    cdef Py_ssize_t n_keys = keys.shape[0]
    cdef Py_ssize_t arity = keys.shape[1]
    cdef Py_ssize_t rows = x.shape[0]
    cdef Py_ssize_t r, t, s
    cdef double acc, prod
    out = np.zeros(rows, dtype=np.float64)
    cdef double[::1] z = out
    for r in range(rows):
        acc = 0.0
        for t in range(n_keys):
            prod = x[r, keys[t, 0]]
            for s in range(1, arity):
                prod = prod * x[r, keys[t, s]]
            acc = acc + coeffs[t] * prod
        z[r] = acc
    return out


def elementary_symmetric(const double[:, ::1] x, int k):
    """Degree-k elementary symmetric polynomial of each row of ``x``."""
    cdef Py_ssize_t rows = x.shape[0]
    cdef Py_ssize_t cols = x.shape[1]
    cdef Py_ssize_t r, j, d
    cdef double xv
    out = np.zeros(rows, dtype=np.float64)
    cdef double[::1] z = out
    e_arr = np.zeros(k + 1, dtype=np.float64)
    cdef double[::1] e = e_arr
    for r in range(rows):
        e[0] = 1.0
        for d in range(1, k + 1):
            e[d] = 0.0
        for j in range(cols):
            xv = x[r, j]
            for d in range(k, 0, -1):
                e[d] = e[d] + xv * e[d - 1]
        z[r] = e[k]
    return out
