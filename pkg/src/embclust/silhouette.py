"""Silhouette scores for judging cluster reliability.

Per instance i in cluster k:

    a(i) = mean distance from i to the other members of k
    b(i) = min over other clusters l of the mean distance from i to l
    s(i) = (b - a) / max(a, b), defined as 0 when a = b = 0

A cluster's score is the mean of s over its members. Two conventions
keep the score total: a singleton cluster scores 0, and when only one
cluster exists every clustered instance scores 0 (there is no b).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dbscan import OUTLIER, Clustering
from .distances import DistanceMatrix


@dataclass(frozen=True)
class SilhouetteReport:
    """Per-instance and per-cluster silhouette values.

    per_instance has one entry per instance; outliers hold NaN.
    per_cluster has one entry per cluster id.
    alpha records the reliability threshold the report was built for.
    """

    per_instance: np.ndarray
    per_cluster: np.ndarray
    alpha: float

    def __post_init__(self):
        if not -1.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [-1, 1], got {self.alpha}")
        finite = self.per_instance[np.isfinite(self.per_instance)]
        if finite.size and (finite.min() < -1.0 - 1e-9 or finite.max() > 1.0 + 1e-9):
            raise ValueError("silhouette values must lie in [-1, 1]")
        if self.per_cluster.size and (
            self.per_cluster.min() < -1.0 - 1e-9 or self.per_cluster.max() > 1.0 + 1e-9
        ):
            raise ValueError("silhouette values must lie in [-1, 1]")


def _check_instance(dist: DistanceMatrix, clustering: Clustering, i: int) -> int:
    if dist.n != clustering.n:
        raise ValueError(f"size mismatch: {dist.n} distances vs {clustering.n} labels")
    if not 0 <= i < clustering.n:
        raise IndexError(f"instance {i} out of range [0, {clustering.n})")
    k = int(clustering.labels[i])
    if k == OUTLIER:
        raise ValueError(f"instance {i} is an outlier")
    return k


def intra_distance(dist: DistanceMatrix, clustering: Clustering, i: int) -> float:
    """Mean distance from i to the other members of its cluster.

    Raises ValueError if i sits in a singleton cluster.
    """
    k = _check_instance(dist, clustering, i)
    members = clustering.members(k)
    if members.size == 1:
        raise ValueError(f"instance {i} is the only member of cluster {k}")
    others = members[members != i]
    return float(dist.values[i, others].sum() / others.size)


def inter_distance(dist: DistanceMatrix, clustering: Clustering, i: int) -> float:
    """Smallest mean distance from i to any cluster it does not belong to.

    Raises ValueError when the clustering has a single cluster.
    """
    k = _check_instance(dist, clustering, i)
    if clustering.K < 2:
        raise ValueError("need at least two clusters")
    best = np.inf
    for l in range(clustering.K):
        if l == k:
            continue
        members = clustering.members(l)
        best = min(best, float(dist.values[i, members].mean()))
    return best


def instance_silhouette(dist: DistanceMatrix, clustering: Clustering, i: int) -> float:
    """Silhouette (b - a) / max(a, b) for one clustered instance.

    Follows the report conventions: 0 for singleton-cluster members,
    0 when K = 1, and 0 when a = b = 0.
    """
    k = _check_instance(dist, clustering, i)
    if clustering.members(k).size == 1 or clustering.K < 2:
        return 0.0
    a = intra_distance(dist, clustering, i)
    b = inter_distance(dist, clustering, i)
    denom = max(a, b)
    if denom == 0.0:
        return 0.0
    return (b - a) / denom


def cluster_silhouette(
    dist: DistanceMatrix, clustering: Clustering, alpha: float = 0.0
) -> SilhouetteReport:
    """Silhouette values for every clustered instance and every cluster."""
    if dist.n != clustering.n:
        raise ValueError(f"size mismatch: {dist.n} distances vs {clustering.n} labels")
    n, K = clustering.n, clustering.K
    per_instance = np.full(n, np.nan)
    per_cluster = np.zeros(K)
    if K == 0:
        return SilhouetteReport(per_instance, per_cluster, float(alpha))

    labels = clustering.labels
    clustered = labels >= 0
    onehot = (labels[:, None] == np.arange(K)[None, :]).astype(np.float64)
    sizes = onehot.sum(axis=0)
    sums = dist.values @ onehot

    if K == 1:
        per_instance[clustered] = 0.0
        return SilhouetteReport(per_instance, per_cluster, float(alpha))

    idx = np.flatnonzero(clustered)
    own = labels[idx]
    own_size = sizes[own]
    # d(i, i) = 0, so the own-cluster sum already excludes self
    a = np.zeros(idx.size)
    multi = own_size > 1
    a[multi] = sums[idx[multi], own[multi]] / (own_size[multi] - 1.0)

    mean_to = sums[idx] / sizes[None, :]
    mean_to[np.arange(idx.size), own] = np.inf
    b = mean_to.min(axis=1)

    denom = np.maximum(a, b)
    s = np.zeros(idx.size)
    nz = denom > 0.0
    s[nz] = (b[nz] - a[nz]) / denom[nz]
    s[~multi] = 0.0

    per_instance[idx] = s
    for k in range(K):
        per_cluster[k] = s[own == k].mean()
    return SilhouetteReport(per_instance, per_cluster, float(alpha))
