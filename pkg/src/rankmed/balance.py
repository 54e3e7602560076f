"""Class-occurrence compensation.

Statistics give every class equal say regardless of how many instances it
has: per-feature means and deviations average the per-class moments, and
design columns are rescaled by n/(c*n_l) so each class contributes the same
total weight to the regression objective.
"""

from dataclasses import dataclass

import numpy as np

from .data import FeatureMatrix, one_hot


@dataclass
class CompensationStats:
    """Class-balanced per-feature mean/deviation and per-instance scale factors."""

    mean: np.ndarray
    std: np.ndarray
    scale: np.ndarray


def class_balanced_stats(features, labels):
    """Balanced moments (every class weighted 1/c) plus instance scale factors.

    mean_j averages the per-class means of feature j; std_j is the square
    root of the per-class-averaged squared deviation from mean_j; scale_i is
    n / (c * n_l) for the class l of instance i. Raises ValueError naming any
    feature whose balanced deviation is zero (it should have been dropped
    upstream as constant).
    """
    mat = features.values
    if mat.shape[1] != labels.n:
        raise ValueError("feature and label instance counts differ")
    c = labels.n_classes
    counts = labels.class_counts
    class_means = np.empty((c, mat.shape[0]))
    for l in range(c):
        class_means[l] = mat[:, labels.codes == l + 1].mean(axis=1)
    mean = class_means.mean(axis=0)

    sq = np.empty((c, mat.shape[0]))
    centered = mat - mean[:, np.newaxis]
    for l in range(c):
        sq[l] = (centered[:, labels.codes == l + 1] ** 2).mean(axis=1)
    std = np.sqrt(sq.mean(axis=0))
    if (std == 0.0).any():
        bad = [features.feature_names[j] for j in np.flatnonzero(std == 0.0)]
        raise ValueError(f"zero compensated deviation for feature(s) {bad}; drop them upstream")

    scale = labels.n / (c * counts[labels.codes - 1].astype(np.float64))
    return CompensationStats(mean, std, scale)


def plain_stats(features, labels):
    """Uncompensated analogue: ordinary mean/population std, all scales 1."""
    mat = features.values
    mean = mat.mean(axis=1)
    std = mat.std(axis=1)
    if (std == 0.0).any():
        bad = [features.feature_names[j] for j in np.flatnonzero(std == 0.0)]
        raise ValueError(f"zero deviation for feature(s) {bad}; drop them upstream")
    return CompensationStats(mean, std, np.ones(labels.n))


def apply_zscore(features, stats):
    """Standardize each feature row with the given statistics."""
    mat = features.values
    if stats.mean.shape[0] != mat.shape[0]:
        raise ValueError("stats computed for a different feature set")
    values = (mat - stats.mean[:, np.newaxis]) / stats.std[:, np.newaxis]
    return FeatureMatrix(values, list(features.feature_names))


def build_design(features):
    """Extended design matrix: feature rows with an all-one row appended."""
    mat = features.values if isinstance(features, FeatureMatrix) else np.asarray(features)
    return np.vstack([mat, np.ones(mat.shape[1])])


def build_compensated_design(features_normalized, labels, stats):
    """Design and target matrices with occurrence compensation folded in.

    Column i of the design is scale_i times the extended instance vector
    (the appended bias entry becomes scale_i, not 1); column i of the target
    is scale_i times the one-hot label column. Solving the plain objective
    on this pair equals solving the occurrence-weighted objective on the
    unscaled pair.
    """
    if stats.scale.shape[0] != labels.n:
        raise ValueError("stats computed for a different instance set")
    design = build_design(features_normalized) * stats.scale
    targets = one_hot(labels) * stats.scale
    return design, targets
