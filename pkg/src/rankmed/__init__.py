"""rankmed: rank-preserving medoid feature selection with compensated
l2,1-norm relevance scoring for labeled datasets."""

from .balance import (
    CompensationStats,
    apply_zscore,
    build_compensated_design,
    build_design,
    class_balanced_stats,
    plain_stats,
)
from .cluster import (
    ClusterPartition,
    cluster_features,
    pairwise_distance,
    select_features,
    select_medoids,
)
from .data import (
    Dataset,
    DatasetError,
    FeatureMatrix,
    LabelVector,
    load_csv,
    one_hot,
    write_csv,
)
from .linalg import EigenSpectrum, RankTracker, eigen_spectrum, numerical_rank
from .solver import (
    SolveReport,
    SolverConfig,
    WeightMatrix,
    objective,
    rank_features,
    relevance_scores,
    solve_l21,
)
from .tree import DecisionTree, EvalResult, evaluate_subset, train_tree

__version__ = "0.1.0"

__all__ = [
    "CompensationStats",
    "apply_zscore",
    "build_compensated_design",
    "build_design",
    "class_balanced_stats",
    "plain_stats",
    "ClusterPartition",
    "cluster_features",
    "pairwise_distance",
    "select_features",
    "select_medoids",
    "Dataset",
    "DatasetError",
    "FeatureMatrix",
    "LabelVector",
    "load_csv",
    "one_hot",
    "write_csv",
    "EigenSpectrum",
    "RankTracker",
    "eigen_spectrum",
    "numerical_rank",
    "SolveReport",
    "SolverConfig",
    "WeightMatrix",
    "objective",
    "rank_features",
    "relevance_scores",
    "solve_l21",
    "DecisionTree",
    "EvalResult",
    "evaluate_subset",
    "train_tree",
]
