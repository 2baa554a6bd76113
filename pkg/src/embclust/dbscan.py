"""Density clustering over a precomputed distance matrix.

Deterministic variant: clusters are discovered in ascending index order
and a border point reachable from several clusters joins the cluster of
the lowest-index core point that reaches it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distances import DistanceMatrix

OUTLIER = -1


@dataclass(frozen=True)
class Clustering:
    """Cluster assignment over n instances.

    labels[i] is a cluster id in [0, K) or OUTLIER (-1). Every id in
    [0, K) has at least one member.
    """

    labels: np.ndarray
    K: int

    def __post_init__(self):
        lab = self.labels
        if not isinstance(lab, np.ndarray) or lab.ndim != 1:
            raise ValueError("labels must be a 1-D array")
        if lab.dtype != np.int64:
            raise ValueError(f"labels must be int64, got {lab.dtype}")
        if lab.size < 1:
            raise ValueError("empty labeling")
        if self.K < 0:
            raise ValueError("K must be non-negative")
        if lab.min() < OUTLIER:
            raise ValueError("labels below OUTLIER")
        if lab.max() >= self.K:
            raise ValueError(f"label {lab.max()} out of range for K={self.K}")
        present = np.unique(lab[lab >= 0])
        if present.size != self.K:
            raise ValueError("every id in [0, K) must have at least one member")

    @property
    def n(self) -> int:
        return self.labels.size

    def members(self, k: int) -> np.ndarray:
        if not 0 <= k < self.K:
            raise IndexError(f"cluster id {k} out of range [0, {self.K})")
        return np.flatnonzero(self.labels == k)

    def member_lists(self) -> list:
        return [np.flatnonzero(self.labels == k) for k in range(self.K)]


def canonicalize_labels(labels: np.ndarray) -> Clustering:
    """Build a Clustering from raw labels, renumbered in first-member order.

    Accepts arbitrary non-negative ids (gaps allowed); -1 marks outliers.
    Cluster 0 ends up holding the smallest member index of any cluster.
    """
    if labels.size and labels.min() < OUTLIER:
        raise ValueError("labels below OUTLIER")
    mapping: dict[int, int] = {}
    new = np.full(labels.size, OUTLIER, dtype=np.int64)
    for i, lab in enumerate(labels):
        if lab == OUTLIER:
            continue
        if lab not in mapping:
            mapping[int(lab)] = len(mapping)
        new[i] = mapping[int(lab)]
    return Clustering(labels=new, K=len(mapping))


def canonicalize(clustering: Clustering) -> Clustering:
    """Renumber ids so cluster 0 holds the smallest member index, and so on.

    Idempotent; outliers keep the OUTLIER label.
    """
    return canonicalize_labels(clustering.labels)


def dbscan(dist: DistanceMatrix, eps: float, min_pts: int) -> Clustering:
    """Cluster by density over dist, in canonical id order.

    A point is core when at least min_pts points (itself included) lie
    within eps. Core points within eps of each other share a cluster.
    Non-core points within eps of a core join that core's cluster, other
    points become outliers.
    """
    if not (np.isfinite(eps) and eps > 0.0):
        raise ValueError(f"eps must be positive, got {eps}")
    if min_pts < 1:
        raise ValueError(f"min_pts must be at least 1, got {min_pts}")

    n = dist.n
    adj = dist.values <= eps
    core = adj.sum(axis=1) >= min_pts
    labels = np.full(n, OUTLIER, dtype=np.int64)

    cid = 0
    for seed in range(n):
        if not core[seed] or labels[seed] != OUTLIER:
            continue
        labels[seed] = cid
        stack = [seed]
        while stack:
            u = stack.pop()
            nxt = np.flatnonzero(adj[u] & core & (labels == OUTLIER))
            labels[nxt] = cid
            stack.extend(nxt.tolist())
        cid += 1

    for i in np.flatnonzero(~core):
        reach = np.flatnonzero(adj[i] & core)
        if reach.size:
            labels[i] = labels[reach[0]]

    return canonicalize_labels(labels)


def remove_clusters(clustering: Clustering, drop) -> Clustering:
    """Turn the members of the given cluster ids into outliers, then canonicalize."""
    drop = {int(k) for k in drop}
    for k in drop:
        if not 0 <= k < clustering.K:
            raise IndexError(f"cluster id {k} out of range [0, {clustering.K})")
    labels = clustering.labels.copy()
    if drop:
        labels[np.isin(clustering.labels, sorted(drop))] = OUTLIER
    return canonicalize_labels(labels)
