"""Downstream validation harness: deterministic CART trees + stratified CV.

Checks whether a feature subset preserves classification quality. Binary
Gini trees with midpoint thresholds, fully deterministic tie-breaking
(lowest feature index, then lowest threshold), and fold assignment by
position within class, so identical inputs give bit-identical results.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels


@dataclass
class _Node:
    feature: int = -1  # local column in the subset; -1 marks a leaf
    threshold: float = 0.0
    left: "_Node" = None
    right: "_Node" = None
    prediction: int = 0  # class code 1..c at leaves


class DecisionTree:
    """Binary CART classifier over a fixed feature subset (1-based indices)."""

    def __init__(self, subset, max_depth, min_leaf, n_classes):
        self.subset = list(subset)
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.n_classes = n_classes
        self.root = None

    def _leaf(self, counts):
        return _Node(prediction=int(np.argmax(counts)) + 1)

    def _build(self, data, codes0, depth):
        n = codes0.size
        counts = np.bincount(codes0, minlength=self.n_classes)
        if depth >= self.max_depth or n < 2 * self.min_leaf or np.count_nonzero(counts) <= 1:
            return self._leaf(counts)
        # any cut of an impure node is never worse than the parent, so the node
        # splits whenever a valid cut exists (zero-gain splits included; they
        # are what lets depth 2 carve the four XOR cells)
        best = None  # (crit, column, threshold)
        for col in range(data.shape[1]):
            order = np.argsort(data[:, col], kind="stable")
            sv = np.ascontiguousarray(data[order, col])
            sy = np.ascontiguousarray(codes0[order])
            pos, crit = kernels.best_split_scan(sv, sy, self.n_classes, self.min_leaf)
            if pos < 0:
                continue
            threshold = (sv[pos] + sv[pos + 1]) / 2.0
            if threshold >= sv[pos + 1]:  # midpoint rounded up to the right value
                threshold = sv[pos]
            if best is None or crit > best[0]:
                best = (crit, col, threshold)
        if best is None:
            return self._leaf(counts)
        _, col, threshold = best
        go_left = data[:, col] <= threshold
        node = _Node(feature=col, threshold=threshold)
        node.left = self._build(data[go_left], codes0[go_left], depth + 1)
        node.right = self._build(data[~go_left], codes0[~go_left], depth + 1)
        return node

    def fit(self, data, codes0):
        """data: (n_samples, n_subset_features); codes0: 0-based class codes."""
        self.root = self._build(np.asarray(data, dtype=np.float64), np.asarray(codes0), 0)
        return self

    def predict_row(self, row):
        node = self.root
        while node.feature >= 0:
            node = node.left if row[node.feature] <= node.threshold else node.right
        return node.prediction

    def predict(self, data):
        """Predicted class codes (1..c) for (n_samples, n_subset_features) data."""
        return np.array([self.predict_row(row) for row in np.asarray(data, dtype=np.float64)])


@dataclass
class EvalResult:
    """Per-class TP/FP rates with class-occurrence-weighted averages."""

    per_class_tp: np.ndarray
    per_class_fp: np.ndarray
    weighted_tp: float
    weighted_fp: float
    feature_subset: list
    folds: int
    class_names: list


def _subset_data(features, subset):
    rows = [features.row(i) for i in subset]
    return np.array(rows).T  # (n_instances, n_subset)


def train_tree(features, labels, subset, max_depth=12, min_leaf=2):
    """Fit a CART tree on all instances, using the given 1-based feature subset."""
    if not subset:
        raise ValueError("feature subset must be nonempty")
    if max_depth < 1 or min_leaf < 1:
        raise ValueError("max_depth and min_leaf must be >= 1")
    tree = DecisionTree(subset, max_depth, min_leaf, labels.n_classes)
    return tree.fit(_subset_data(features, subset), labels.codes - 1)


def evaluate_subset(features, labels, subset, folds=10, max_depth=12, min_leaf=2):
    """Stratified k-fold cross-validation of a CART tree on a feature subset.

    Fold assignment is each instance's position within its class modulo the
    fold count; every instance is predicted exactly once and rates are
    computed on the pooled predictions. TP is per-class recall; FP the
    fraction of other-class instances predicted as the class.
    """
    if not subset:
        raise ValueError("feature subset must be nonempty")
    if folds < 2:
        raise ValueError("folds must be >= 2")
    counts = labels.class_counts
    short = [labels.class_names[l] for l in range(labels.n_classes) if counts[l] < folds]
    if short:
        raise ValueError(f"class(es) {short} have fewer instances than folds={folds}")

    data = _subset_data(features, subset)
    codes0 = labels.codes - 1
    fold_of = np.empty(labels.n, dtype=np.int64)
    for l in range(labels.n_classes):
        members = np.flatnonzero(codes0 == l)
        fold_of[members] = np.arange(members.size) % folds

    predicted = np.empty(labels.n, dtype=np.int64)
    for f in range(folds):
        test = fold_of == f
        tree = DecisionTree(subset, max_depth, min_leaf, labels.n_classes)
        tree.fit(data[~test], codes0[~test])
        predicted[test] = tree.predict(data[test])

    c = labels.n_classes
    tp = np.empty(c)
    fp = np.empty(c)
    for l in range(c):
        is_l = labels.codes == l + 1
        tp[l] = np.count_nonzero(predicted[is_l] == l + 1) / counts[l]
        negatives = labels.n - counts[l]
        fp[l] = (
            np.count_nonzero(predicted[~is_l] == l + 1) / negatives if negatives else 0.0
        )
    share = counts / labels.n
    return EvalResult(
        per_class_tp=tp,
        per_class_fp=fp,
        weighted_tp=float(share @ tp),
        weighted_fp=float(share @ fp),
        feature_subset=list(subset),
        folds=folds,
        class_names=list(labels.class_names),
    )
