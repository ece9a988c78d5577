# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled evaluation kernel for free polynomials on matrix tuples.

Word products use plain C loops for small matrices, where BLAS call
overhead dominates, and dgemm above the crossover size.
"""

import numpy as np

from scipy.linalg.cython_blas cimport dgemm

DEF BLAS_CUTOVER = 16


cdef void _matmul(double[:, ::1] A, double[:, ::1] B, double[:, ::1] C,
                  Py_ssize_t n) noexcept nogil:
    """C = A @ B for n x n row-major matrices."""
    cdef Py_ssize_t i, j, a
    cdef double s
    cdef int ni
    cdef double one = 1.0, zero = 0.0
    if n < BLAS_CUTOVER:
        for i in range(n):
            for j in range(n):
                s = 0.0
                for a in range(n):
                    s += A[i, a] * B[a, j]
                C[i, j] = s
    else:
        # row-major C = A @ B is column-major C^T = B^T @ A^T
        ni = <int> n
        dgemm("N", "N", &ni, &ni, &ni, &one, &B[0, 0], &ni,
              &A[0, 0], &ni, &zero, &C[0, 0], &ni)


def eval_compiled(int[::1] letters, int[::1] offsets, double[:, :, ::1] coeffs,
                  double[:, :, ::1] X):
    cdef Py_ssize_t nterms = coeffs.shape[0]
    cdef Py_ssize_t rows = coeffs.shape[1]
    cdef Py_ssize_t cols = coeffs.shape[2]
    cdef Py_ssize_t n = X.shape[1]
    out_arr = np.zeros((rows * n, cols * n))
    cur_arr = np.empty((n, n))
    nxt_arr = np.empty((n, n))
    cdef double[:, ::1] out = out_arr
    cdef double[:, ::1] cur = cur_arr
    cdef double[:, ::1] nxt = nxt_arr
    cdef double[:, ::1] tmp
    cdef Py_ssize_t k, t, i, j, a, b
    cdef int l
    cdef double cab

    for k in range(nterms):
        for i in range(n):
            for j in range(n):
                cur[i, j] = 1.0 if i == j else 0.0
        for t in range(offsets[k], offsets[k + 1]):
            l = letters[t]
            _matmul(cur, X[l], nxt, n)
            tmp = cur
            cur = nxt
            nxt = tmp
        for a in range(rows):
            for b in range(cols):
                cab = coeffs[k, a, b]
                if cab != 0.0:
                    for i in range(n):
                        for j in range(n):
                            out[a * n + i, b * n + j] += cab * cur[i, j]
    return out_arr
