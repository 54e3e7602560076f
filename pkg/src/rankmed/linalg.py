"""Dense matrix kernels: numerical rank, incremental rank tracking, eigen spectrum.

The tracker answers the clustering inner-loop question "does this row extend
the span of what we have seen" without recomputing a full decomposition per
test; numerical_rank and eigen_spectrum use the SVD.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels

# Relative residual threshold below which a row is declared dependent on the
# tracked basis (after one reorthogonalization pass). Policy default; the
# SVD-based functions use the max(m,n)*eps*sigma_max convention instead
# because sigma_max is available there.
DEFAULT_TRACKER_TOL = 1e-8

_EPS = np.finfo(np.float64).eps


def _as_matrix(mat):
    values = getattr(mat, "values", mat)
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError("expected a nonempty 2-D matrix")
    if not np.isfinite(arr).all():
        raise ValueError("matrix contains non-finite values")
    return arr


def numerical_rank(mat, tol=0.0):
    """Number of singular values strictly above ``tol * sigma_max``.

    ``tol=0`` selects the default relative tolerance
    ``max(rows, cols) * machine_epsilon``.

    >>> numerical_rank(np.eye(3))
    3
    """
    arr = _as_matrix(mat)
    if tol < 0:
        raise ValueError("tol must be >= 0")
    sv = np.linalg.svd(arr, compute_uv=False)
    smax = sv[0]
    if smax == 0.0:
        return 0
    rel = tol if tol > 0 else max(arr.shape) * _EPS
    return int(np.count_nonzero(sv > rel * smax))


class RankTracker:
    """Incremental orthonormal basis over row vectors of length n.

    try_extend tests whether a row is (numerically) inside the current span;
    independent rows are absorbed, dependent rows leave the tracker
    untouched. Basis vectors stay pairwise orthonormal thanks to the second
    Gram-Schmidt sweep.
    """

    def __init__(self, n, tol=0.0):
        if n < 1:
            raise ValueError("dimension must be >= 1")
        if tol < 0:
            raise ValueError("tol must be >= 0")
        self.n = int(n)
        self.tol = float(tol) if tol > 0 else DEFAULT_TRACKER_TOL
        self.rank = 0
        self._basis = np.empty((min(8, self.n), self.n), dtype=np.float64)

    @property
    def basis(self):
        """Orthonormal basis rows accumulated so far (read-only view)."""
        view = self._basis[: self.rank]
        view.flags.writeable = False
        return view

    def _grow(self):
        if self.rank == self._basis.shape[0]:
            new_cap = min(self.n, max(1, 2 * self._basis.shape[0]))
            grown = np.empty((new_cap, self.n), dtype=np.float64)
            grown[: self.rank] = self._basis[: self.rank]
            self._basis = grown

    def _project(self, row):
        row = np.ascontiguousarray(row, dtype=np.float64)
        if row.shape != (self.n,):
            raise ValueError(f"row has shape {row.shape}, expected ({self.n},)")
        if not np.isfinite(row).all():
            raise ValueError("row contains non-finite values")
        row_norm = float(np.linalg.norm(row))
        if row_norm == 0.0:
            return None, 0.0, 0.0
        residual, res_norm = kernels.mgs_residual(self._basis, self.rank, row)
        return residual, res_norm, row_norm

    def is_dependent(self, row):
        """Pure test: would ``row`` leave the tracked rank unchanged?

        Never mutates the tracker. Zero rows are dependent by definition.
        """
        _, res_norm, row_norm = self._project(row)
        return row_norm == 0.0 or res_norm <= self.tol * row_norm

    def try_extend(self, row):
        """True if ``row`` extended the basis (independent), False if dependent.

        A row whose residual after projection is <= tol * ||row|| (or a zero
        row) is dependent and leaves the state unchanged.
        """
        residual, res_norm, row_norm = self._project(row)
        if row_norm == 0.0 or res_norm <= self.tol * row_norm:
            return False
        self._grow()
        self._basis[self.rank] = residual / res_norm
        self.rank += 1
        return True


@dataclass
class EigenSpectrum:
    """Descending eigenvalues of the scaled outer-product matrix F F^T / n."""

    eigenvalues: np.ndarray
    effective_rank: int
    threshold: float

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=np.float64)


def eigen_spectrum(mat, threshold=0.0):
    """Eigen spectrum of ``F F^T / n`` for an (n_features x n_instances) matrix.

    Computed as squared singular values of ``F / sqrt(n)`` (never forming the
    outer product, which would square the condition number). effective_rank
    counts eigenvalues strictly above ``threshold * lambda_max``; threshold=0
    selects the numerical_rank default applied to eigenvalues as squared
    singular values, so effective_rank equals numerical_rank exactly.

    >>> eigen_spectrum(np.eye(3)).eigenvalues
    array([0.33333333, 0.33333333, 0.33333333])
    """
    arr = _as_matrix(mat)
    if not 0.0 <= threshold < 1.0:
        raise ValueError("threshold must lie in [0, 1)")
    n = arr.shape[1]
    sv = np.linalg.svd(arr / np.sqrt(n), compute_uv=False)
    eigenvalues = np.maximum(sv * sv, 0.0)
    lam_max = eigenvalues[0] if eigenvalues.size else 0.0
    if lam_max == 0.0:
        return EigenSpectrum(eigenvalues, 0, threshold)
    rel = threshold if threshold > 0 else (max(arr.shape) * _EPS) ** 2
    effective = int(np.count_nonzero(eigenvalues > rel * lam_max))
    return EigenSpectrum(eigenvalues, effective, rel)
