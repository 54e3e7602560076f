"""Rank-preserving medoid clustering of feature rows.

Phase 1 partitions features into linear-dependency clusters with a single
shared rank tracker: each pass seeds a new cluster with the lowest-index
unassigned feature (the tracker absorbs seeds only, and is never reset, so
seeds are mutually independent and the cluster count equals the matrix
rank), then sweeps the remaining features with a pure dependency test.
Phase 2 picks one medoid per cluster by minimal summed Euclidean distance
to the other members. Feature indices throughout are 1-based.
"""

from dataclasses import dataclass, replace

import numpy as np

from .linalg import RankTracker, _as_matrix


@dataclass
class ClusterPartition:
    """Disjoint feature clusters covering 1..m, with optional medoids.

    clusters are in discovery order, each listing its seed first and later
    joiners in index order. rank_checks counts inner-loop dependency tests,
    bounded by m(m-1)/2.
    """

    clusters: list
    seed_order: list
    rank_checks: int
    medoids: list = None

    @property
    def k(self):
        return len(self.clusters)

    def feature_count(self):
        return sum(len(members) for members in self.clusters)

    def medoid_indices(self):
        """Medoids sorted ascending; requires Phase 2 to have run."""
        if self.medoids is None:
            raise ValueError("medoids not selected yet")
        return sorted(self.medoids)


def cluster_features(features, tol=0.0):
    """Phase 1: group features into dependency clusters (medoids unset).

    Rows are processed in ascending index order. A feature joins the current
    cluster iff it does not raise the rank of the seed span accumulated so
    far; independent features stay unassigned and seed later clusters.

    Raises ValueError if a pass seed is numerically zero (a zero feature
    carries no rank, so it cannot seed a cluster; drop it upstream).
    """
    mat = _as_matrix(features)
    m, n = mat.shape
    tracker = RankTracker(n, tol)
    unassigned = list(range(m))
    clusters = []
    seeds = []
    checks = 0
    while unassigned:
        seed = unassigned.pop(0)
        if not tracker.try_extend(mat[seed]):
            names = getattr(features, "feature_names", None)
            label = names[seed] if names else f"#{seed + 1}"
            raise ValueError(
                f"feature {label} is numerically zero and cannot seed a cluster; "
                "drop zero-variance features upstream"
            )
        members = [seed + 1]
        still_open = []
        for idx in unassigned:
            checks += 1
            if tracker.is_dependent(mat[idx]):
                members.append(idx + 1)
            else:
                still_open.append(idx)
        clusters.append(members)
        seeds.append(seed + 1)
        unassigned = still_open
    bound = m * (m - 1) // 2
    assert checks <= bound, f"dependency tests {checks} exceed bound {bound}"
    assert len(clusters) == tracker.rank
    return ClusterPartition(clusters, seeds, checks)


def pairwise_distance(features, i, j):
    """Euclidean distance between feature rows i and j (1-based indices).

    Rows are expected to be Z-score normalized upstream when the distance
    feeds medoid selection.
    """
    mat = _as_matrix(features)
    m = mat.shape[0]
    for idx in (i, j):
        if not 1 <= idx <= m:
            raise IndexError(f"feature index {idx} out of range 1..{m}")
    return float(np.linalg.norm(mat[i - 1] - mat[j - 1]))


def _cluster_medoid(mat, members):
    if len(members) == 1:
        return members[0]
    if len(members) == 2:
        # deterministic stand-in for an arbitrary choice between two members
        return min(members)
    rows = mat[[idx - 1 for idx in members]]
    diffs = rows[:, np.newaxis, :] - rows[np.newaxis, :, :]
    dists = np.sqrt((diffs * diffs).sum(axis=2))
    sums = dists.sum(axis=1)
    order = sorted(range(len(members)), key=lambda p: (sums[p], members[p]))
    return members[order[0]]


def select_medoids(partition, features):
    """Phase 2: pick each cluster's medoid on the given (normalized) matrix.

    For clusters of size >= 3 the medoid minimizes the sum of Euclidean
    distances to the other members (ties to the lowest feature index); pairs
    take the lower-index member; singletons their sole member.
    """
    mat = _as_matrix(features)
    if partition.feature_count() != mat.shape[0]:
        raise ValueError("partition does not match matrix feature count")
    medoids = [_cluster_medoid(mat, members) for members in partition.clusters]
    return replace(partition, medoids=medoids)


def select_features(partition):
    """Selected (independent) features: the medoids, ascending."""
    return partition.medoid_indices()
