"""Joint l2,1-norm sparse regression via iteratively reweighted least squares.

Minimizes  sum_i ||W^T x_i - y_i||_2  +  gamma * sum_j ||w_j||_2  over the
extended weight matrix W (feature rows plus a bias row). The unsquared data
term couples instances through their residual norms; each IRLS step solves
the weighted normal system obtained by majorizing every norm at the current
iterate, which never increases the objective.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve


@dataclass
class SolverConfig:
    """Regularization strength and stopping controls."""

    gamma: float = 1.0
    max_iters: int = 200
    rel_tol: float = 1e-7
    eps: float = 1e-10

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.rel_tol <= 0 or self.eps <= 0:
            raise ValueError("rel_tol and eps must be > 0")


@dataclass
class SolveReport:
    objective_trace: list
    iterations: int
    converged: bool


@dataclass
class WeightMatrix:
    """Extended weights, one row per feature plus a trailing bias row."""

    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 2 or self.weights.shape[0] < 2:
            raise ValueError("weights must be 2-D with at least one feature row plus bias")
        if not np.isfinite(self.weights).all():
            raise ValueError("weights contain non-finite values")

    @property
    def feature_weights(self):
        """Rows for the features only (bias row excluded)."""
        return self.weights[:-1]

    @property
    def bias_row(self):
        return self.weights[-1]

    @property
    def per_class(self):
        return np.abs(self.feature_weights)

    @property
    def total(self):
        """Per-feature total relevance: Euclidean norm of the feature's row."""
        return np.linalg.norm(self.feature_weights, axis=1)


def _weights_of(w):
    return w.weights if isinstance(w, WeightMatrix) else np.asarray(w, dtype=np.float64)


def objective(weights, design, targets, gamma):
    """Objective value: data-term column norms plus gamma-weighted row norms."""
    w = _weights_of(weights)
    if w.shape[0] != design.shape[0] or w.shape[1] != targets.shape[0]:
        raise ValueError("weight dimensions do not match design/targets")
    if design.shape[1] != targets.shape[1]:
        raise ValueError("design and targets disagree on instance count")
    residual = w.T @ design - targets
    data_term = np.linalg.norm(residual, axis=0).sum()
    return float(data_term + gamma * np.linalg.norm(w, axis=1).sum())


def solve_l21(design, targets, config=None):
    """Solve the joint l2,1 regression; returns (WeightMatrix, SolveReport).

    design is (d, n) with the bias row included; targets is (c, n).
    Deterministic: starts from the ridge solution and reweights until the
    objective's relative change drops below config.rel_tol. converged=False
    with the best iterate if max_iters is exhausted.
    """
    config = config or SolverConfig()
    design = np.asarray(design, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if design.ndim != 2 or targets.ndim != 2 or design.shape[1] != targets.shape[1]:
        raise ValueError("design must be (d, n) and targets (c, n)")
    if not (np.isfinite(design).all() and np.isfinite(targets).all()):
        raise ValueError("non-finite input")

    d, n = design.shape
    gram = design @ design.T
    w = cho_solve(cho_factor(gram + config.gamma * np.eye(d)), design @ targets.T)

    trace = [objective(w, design, targets, config.gamma)]
    converged = False
    for _ in range(config.max_iters):
        residual = w.T @ design - targets
        rho = np.maximum(np.linalg.norm(residual, axis=0), config.eps)
        nu = np.maximum(np.linalg.norm(w, axis=1), config.eps)
        lhs = (design / rho) @ design.T
        lhs[np.diag_indices(d)] += config.gamma / nu
        rhs = (design / rho) @ targets.T
        w = cho_solve(cho_factor(lhs), rhs)
        trace.append(objective(w, design, targets, config.gamma))
        change = abs(trace[-1] - trace[-2])
        if change <= config.rel_tol * max(abs(trace[-2]), np.finfo(float).tiny):
            converged = True
            break
    return WeightMatrix(w), SolveReport(trace, len(trace) - 1, converged)


def relevance_scores(weights):
    """Per-class magnitudes and total relevance, bias row excluded."""
    wm = weights if isinstance(weights, WeightMatrix) else WeightMatrix(weights)
    return wm.per_class, wm.total


def rank_features(total):
    """Features ordered by descending score, ties by ascending 1-based index."""
    total = np.asarray(total, dtype=np.float64)
    if not np.isfinite(total).all():
        raise ValueError("scores must be finite")
    order = sorted(range(total.size), key=lambda j: (-total[j], j))
    return [(j + 1, float(total[j])) for j in order]
