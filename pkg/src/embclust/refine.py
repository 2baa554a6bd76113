"""Silhouette-gated hierarchical cluster decomposition.

A coarse density pass runs at the configured eps. Every coarse cluster
whose silhouette is at or below alpha is re-clustered in isolation at
two thirds of eps (same min_pts, same global distances restricted to
its members). Fine sub-clusters replace the parent; fine outliers
become global outliers. Exactly one refinement level is applied.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dbscan import OUTLIER, Clustering, canonicalize_labels, dbscan
from .distances import DistanceMatrix
from .silhouette import SilhouetteReport, cluster_silhouette


@dataclass(frozen=True)
class RefineResult:
    """Everything the refinement pass produced.

    clustering: final canonical clustering after decomposition.
    coarse: the untouched coarse pass.
    report: coarse-pass silhouettes (the gate inputs).
    decomposed: coarse cluster ids that were re-clustered.
    """

    clustering: Clustering
    coarse: Clustering
    report: SilhouetteReport
    decomposed: tuple


def refine_clusters(
    dist: DistanceMatrix, eps: float, alpha: float, min_pts: int
) -> RefineResult:
    """Run the coarse pass, decompose unreliable clusters, canonicalize."""
    coarse = dbscan(dist, eps, min_pts)
    report = cluster_silhouette(dist, coarse, alpha=alpha)

    # singletons can only appear through bookkeeping; they are never re-split
    decomposed = tuple(
        k
        for k in range(coarse.K)
        if report.per_cluster[k] <= alpha and coarse.members(k).size > 1
    )

    if not decomposed:
        return RefineResult(canonicalize_labels(coarse.labels), coarse, report, ())

    labels = coarse.labels.copy()
    next_id = coarse.K
    fine_eps = eps * 2.0 / 3.0
    for k in decomposed:
        members = coarse.members(k)
        sub = DistanceMatrix(
            np.ascontiguousarray(dist.values[np.ix_(members, members)]), dist.kind
        )
        fine = dbscan(sub, fine_eps, min_pts)
        out = np.where(fine.labels == OUTLIER, OUTLIER, fine.labels + next_id)
        labels[members] = out
        next_id += fine.K

    final = canonicalize_labels(labels)
    return RefineResult(final, coarse, report, decomposed)


def hierarchical_cluster(
    dist: DistanceMatrix, eps: float, alpha: float, min_pts: int
) -> Clustering:
    """Final clustering of the refinement pass (see refine_clusters)."""
    return refine_clusters(dist, eps, alpha, min_pts).clustering
