"""Pure-numpy fallbacks for the compiled kernels.

Same contracts as ``rankmed._ckernels``. The split scan is bit-identical to
the compiled one (both reduce to one float division per side from exact
integer counts); the Gram-Schmidt residual may differ in the last ulps
because BLAS accumulation order differs from the C loop.
"""

import numpy as np


def mgs_residual(basis, count, row):
    r = row.astype(np.float64, copy=True)
    for _ in range(2):
        for j in range(count):
            b = basis[j]
            r -= np.dot(b, r) * b
    return r, float(np.linalg.norm(r))


def best_split_scan(values, labels, n_classes, min_leaf):
    n = values.shape[0]
    if n < 2 * min_leaf:
        return -1, -1.0
    onehot = np.zeros((n, n_classes), dtype=np.int64)
    onehot[np.arange(n), labels] = 1
    cum = np.cumsum(onehot, axis=0)[:-1]  # left counts after position p
    total = cum[-1] + onehot[-1]
    n_left = np.arange(1, n, dtype=np.int64)
    sq_left = np.sum(cum * cum, axis=1)
    rem = total[np.newaxis, :] - cum
    sq_right = np.sum(rem * rem, axis=1)
    crit = sq_left.astype(np.float64) / n_left + sq_right.astype(np.float64) / (n - n_left)
    valid = (values[:-1] != values[1:]) & (n_left >= min_leaf) & (n - n_left >= min_leaf)
    if not valid.any():
        return -1, -1.0
    crit = np.where(valid, crit, -1.0)
    pos = int(np.argmax(crit))  # argmax keeps the lowest position on ties
    return pos, float(crit[pos])
