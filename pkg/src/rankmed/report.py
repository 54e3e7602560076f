"""Report assembly for the CLI: one JSON object per command run.

Every report embeds the input digest, the effective parameter values, and
the tool version; the shipped JSON schema (schemas/report.schema.json)
describes all four report kinds.
"""

import json
from importlib import resources

import numpy as np

from .balance import (
    build_compensated_design,
    build_design,
    class_balanced_stats,
    plain_stats,
    apply_zscore,
)
from .cluster import cluster_features, select_features, select_medoids
from .data import DatasetError, one_hot
from .linalg import eigen_spectrum, numerical_rank
from .solver import SolverConfig, rank_features, solve_l21

TOOL = "rankmed"
VERSION = "0.1.0"

PHASE2_DISTANCE = "euclidean-zscore"


def load_report_schema():
    text = resources.files("rankmed.schemas").joinpath("report.schema.json").read_text()
    return json.loads(text)


def _envelope(command, dataset, params, warnings=None):
    return {
        "tool": TOOL,
        "version": VERSION,
        "command": command,
        "input": {
            "path": dataset.source_path,
            "sha256": dataset.sha256,
            "label_column": dataset.label_column,
            "n_features": dataset.features.n_features,
            "n_instances": dataset.features.n_instances,
            "dropped_features": list(dataset.dropped_features),
            "class_names": list(dataset.labels.class_names),
        },
        "params": params,
        "warnings": list(warnings or []),
    }


def _names(dataset, indices):
    return [dataset.features.feature_names[i - 1] for i in indices]


def spectrum_lines(dataset, tol=0.0):
    """TSV lines for the eigen spectrum of the raw feature matrix.

    The singular-value-style tolerance is squared for the eigenvalue cut so
    the effective rank matches numerical_rank at the same --tol.
    """
    spec = eigen_spectrum(dataset.features, tol * tol)
    lines = [f"# effective_rank={spec.effective_rank}"]
    for i, lam in enumerate(spec.eigenvalues, start=1):
        lines.append(f"{i}\t{lam:.12g}")
    return lines, spec


def run_clustering(dataset, tol=0.0):
    """Phase 1 on raw rows, Phase 2 distances on plain Z-scored rows."""
    partition = cluster_features(dataset.features, tol)
    normalized = apply_zscore(dataset.features, plain_stats(dataset.features, dataset.labels))
    return select_medoids(partition, normalized)


def cluster_report(dataset, tol=0.0):
    partition = run_clustering(dataset, tol)
    medoids = select_features(partition)
    medoid_rank = numerical_rank(dataset.features.values[[i - 1 for i in medoids]], tol)
    warnings = []
    if medoid_rank < partition.k:
        warnings.append(
            f"medoid set has numerical rank {medoid_rank} < k={partition.k}; "
            "the selected features are not mutually independent at this tolerance"
        )
    report = _envelope("cluster", dataset, {"tol": tol, "distance": PHASE2_DISTANCE}, warnings)
    report.update(
        {
            "k": partition.k,
            "clusters": [_names(dataset, members) for members in partition.clusters],
            "cluster_indices": [list(members) for members in partition.clusters],
            "medoids": _names(dataset, medoids),
            "medoid_indices": medoids,
            "rank_checks": partition.rank_checks,
            "medoid_set_full_rank": medoid_rank == partition.k,
        }
    )
    return report, partition


def relevance_pipeline(dataset, gamma=1.0, compensated=True, feature_indices=None):
    """Solve the relevance regression; returns (indices, WeightMatrix, SolveReport).

    feature_indices restricts to a 1-based subset (e.g. medoids); indices in
    the result refer to the original dataset order.
    """
    if dataset.labels.n_classes < 2:
        raise DatasetError("relevance analysis needs at least 2 classes")
    indices = list(feature_indices) if feature_indices else list(
        range(1, dataset.features.n_features + 1)
    )
    feats = dataset.features.restrict(indices)
    if compensated:
        stats = class_balanced_stats(feats, dataset.labels)
        normalized = apply_zscore(feats, stats)
        design, targets = build_compensated_design(normalized, dataset.labels, stats)
    else:
        stats = plain_stats(feats, dataset.labels)
        normalized = apply_zscore(feats, stats)
        design = build_design(normalized)
        targets = one_hot(dataset.labels)
    weights, solve_report = solve_l21(design, targets, SolverConfig(gamma=gamma))
    return indices, weights, solve_report


def relevance_report(dataset, gamma=1.0, compensated=True, medoids_only=False, tol=0.0):
    indices = None
    if medoids_only:
        indices = select_features(run_clustering(dataset, tol))
    indices, weights, solve_report = relevance_pipeline(dataset, gamma, compensated, indices)
    per_class, total = weights.per_class, weights.total
    ranking = [
        {"index": indices[local - 1], "name": dataset.features.feature_names[indices[local - 1] - 1],
         "score": score}
        for local, score in rank_features(total)
    ]
    report = _envelope(
        "relevance",
        dataset,
        {"gamma": gamma, "compensated": compensated, "medoids_only": medoids_only, "tol": tol},
    )
    report.update(
        {
            "feature_indices": indices,
            "features": _names(dataset, indices),
            "per_class": [[float(v) for v in row] for row in per_class],
            "total": [float(v) for v in total],
            "ranking": ranking,
            "solver": {
                "iterations": solve_report.iterations,
                "converged": solve_report.converged,
                "objective": solve_report.objective_trace[-1],
            },
        }
    )
    return report, indices, weights


def select_report(dataset, drop_bottom=0, gamma=1.0, tol=0.0):
    partition = run_clustering(dataset, tol)
    medoids = select_features(partition)
    if drop_bottom >= partition.k:
        raise ValueError(f"--drop-bottom {drop_bottom} must be below k={partition.k}")
    _, weights, _ = relevance_pipeline(dataset, gamma, True, medoids)
    ranked = rank_features(weights.total)  # local 1..k positions into `medoids`
    as_original = [(medoids[local - 1], score) for local, score in ranked]
    dropped = sorted(as_original[len(as_original) - drop_bottom :]) if drop_bottom else []
    kept = sorted(as_original[: len(as_original) - drop_bottom])
    report = _envelope(
        "select", dataset, {"drop_bottom": drop_bottom, "gamma": gamma, "tol": tol}
    )
    report.update(
        {
            "k": partition.k,
            "medoid_indices": medoids,
            "medoids": _names(dataset, medoids),
            "selected": [
                {"index": i, "name": dataset.features.feature_names[i - 1], "score": s}
                for i, s in kept
            ],
            "dropped_bottom": [
                {"index": i, "name": dataset.features.feature_names[i - 1], "score": s}
                for i, s in dropped
            ],
        }
    )
    return report, [i for i, _ in kept]


def evaluate_report(dataset, result, params):
    report = _envelope("evaluate", dataset, params)
    report.update(
        {
            "per_class_rates": [
                {
                    "class": result.class_names[l],
                    "tp": float(result.per_class_tp[l]),
                    "fp": float(result.per_class_fp[l]),
                    "count": int(dataset.labels.class_counts[l]),
                }
                for l in range(len(result.class_names))
            ],
            "weighted_tp": result.weighted_tp,
            "weighted_fp": result.weighted_fp,
            "feature_subset": {
                "indices": list(result.feature_subset),
                "names": _names(dataset, result.feature_subset),
            },
            "folds": result.folds,
        }
    )
    return report


def scores_tsv(report):
    """Two-column TSV (index, total score) from a relevance report."""
    lines = ["# feature\ttotal_relevance"]
    for idx, total in zip(report["feature_indices"], report["total"]):
        lines.append(f"{idx}\t{total:.12g}")
    return lines


def per_class_tsv(report):
    """Per-class score table: one row per feature, one column per class."""
    classes = report["input"]["class_names"]
    lines = ["# feature\t" + "\t".join(classes)]
    for idx, row in zip(report["feature_indices"], report["per_class"]):
        cells = "\t".join(f"{v:.12g}" for v in row)
        lines.append(f"{idx}\t{cells}")
    return lines


def to_json(report):
    return json.dumps(report, indent=2, allow_nan=False) + "\n"
