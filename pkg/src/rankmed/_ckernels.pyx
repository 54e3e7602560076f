# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: Gram-Schmidt residual projection and CART split scan.

Semantics must stay in lockstep with the numpy fallbacks in
``rankmed._kernels_py``; the dispatcher in ``rankmed.kernels`` selects one
implementation per process.
"""

from libc.math cimport sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()


def mgs_residual(double[:, ::1] basis, Py_ssize_t count, double[::1] row):
    """Residual of ``row`` after two modified Gram-Schmidt sweeps.

    ``basis[:count]`` holds orthonormal unit vectors. Returns
    ``(residual, residual_norm)``; the second sweep reorthogonalizes so the
    result is safe for rank decisions near the dependence threshold.
    """
    cdef Py_ssize_t n = row.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[::1] r = out
    cdef Py_ssize_t i, j, sweep
    cdef double coef, acc

    for i in range(n):
        r[i] = row[i]
    for sweep in range(2):
        for j in range(count):
            coef = 0.0
            for i in range(n):
                coef += basis[j, i] * r[i]
            for i in range(n):
                r[i] -= coef * basis[j, i]
    acc = 0.0
    for i in range(n):
        acc += r[i] * r[i]
    return out, sqrt(acc)


def best_split_scan(double[::1] values, cnp.int64_t[::1] labels,
                    Py_ssize_t n_classes, Py_ssize_t min_leaf):
    """Best binary cut of a node along one feature.

    ``values`` are sorted ascending with ``labels`` aligned (0-based codes).
    Maximizes sum-of-squared-class-counts over count, left plus right
    (equivalent to minimizing size-weighted Gini), considering only cuts
    between distinct values with both sides >= min_leaf. Returns
    ``(pos, crit)`` where the cut separates ``[:pos+1]`` from ``[pos+1:]``;
    pos is -1 when no cut is valid. Ties keep the lowest position.
    """
    cdef Py_ssize_t n = values.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] left_buf = np.zeros(n_classes, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] right_buf = np.zeros(n_classes, dtype=np.int64)
    cdef cnp.int64_t[::1] left = left_buf
    cdef cnp.int64_t[::1] right = right_buf
    cdef Py_ssize_t p, best_pos = -1
    cdef cnp.int64_t y
    cdef cnp.int64_t sq_left = 0, sq_right = 0
    cdef double crit, best_crit = -1.0

    if n < 2 * min_leaf:
        return -1, -1.0
    for p in range(n):
        right[labels[p]] += 1
    for p in range(n_classes):
        sq_right += right[p] * right[p]
    for p in range(n - 1):
        y = labels[p]
        sq_left += 2 * left[y] + 1
        sq_right -= 2 * right[y] - 1
        left[y] += 1
        right[y] -= 1
        if p + 1 < min_leaf or n - p - 1 < min_leaf:
            continue
        if values[p] == values[p + 1]:
            continue
        crit = (<double>sq_left) / (<double>(p + 1)) + (<double>sq_right) / (<double>(n - p - 1))
        if crit > best_crit:
            best_crit = crit
            best_pos = p
    return best_pos, best_crit
