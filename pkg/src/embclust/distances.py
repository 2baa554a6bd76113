"""Pairwise distances and reciprocal-neighbor set construction.

All distance math runs in float64 regardless of input precision.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingSet

EUCLIDEAN = "euclidean"
JACCARD = "jaccard"

SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric n x n distance matrix with a kind tag."""

    values: np.ndarray
    kind: str

    def __post_init__(self):
        v = self.values
        if not isinstance(v, np.ndarray) or v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("values must be a square 2-D array")
        if v.dtype != np.float64:
            raise ValueError(f"values must be float64, got {v.dtype}")
        if self.kind not in (EUCLIDEAN, JACCARD):
            raise ValueError(f"unknown distance kind {self.kind!r}")
        if v.shape[0] < 1:
            raise ValueError("empty distance matrix")
        if np.abs(v - v.T).max() > SYMMETRY_TOL:
            raise ValueError("matrix is not symmetric")
        if np.abs(np.diagonal(v)).max() > 0.0:
            raise ValueError("diagonal must be zero")
        if v.min() < 0.0:
            raise ValueError("distances must be non-negative")
        if self.kind == JACCARD and v.max() > 1.0 + 1e-12:
            raise ValueError("jaccard distances must lie in [0, 1]")

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class NeighborSets:
    """Expanded reciprocal-neighbor sets, one sorted index array per instance."""

    k1: int
    sets: tuple

    def __post_init__(self):
        for i, s in enumerate(self.sets):
            if i not in s:
                raise ValueError(f"set {i} does not contain its own index")

    @property
    def n(self) -> int:
        return len(self.sets)


def pairwise_euclidean(embeddings: EmbeddingSet) -> DistanceMatrix:
    """Full Euclidean distance matrix, exactly symmetric with zero diagonal."""
    x = embeddings.data
    gram = x @ x.T
    sq = np.diagonal(gram)
    d2 = sq[:, None] + sq[None, :] - 2.0 * gram
    np.maximum(d2, 0.0, out=d2)
    d = np.sqrt(d2)
    # mirror the strict upper triangle so (i, j) and (j, i) are bit-identical
    upper = np.triu(d, 1)
    return DistanceMatrix(upper + upper.T, EUCLIDEAN)


def _nearest_mask(values: np.ndarray, k: int) -> np.ndarray:
    """Boolean mask of {i} plus the k nearest other indices per row.

    Ties are broken toward the smaller index (stable argsort).
    """
    n = values.shape[0]
    order = np.argsort(values, axis=1, kind="stable")
    mask = np.zeros((n, n), dtype=bool)
    rows = np.arange(n)
    for i in range(n):
        cand = order[i]
        cand = cand[cand != i][:k]
        mask[i, cand] = True
    mask[rows, rows] = True
    return mask


def k_reciprocal_neighbors(dist: DistanceMatrix, k1: int) -> NeighborSets:
    """Expanded k-reciprocal neighbor sets over a Euclidean distance matrix.

    For each instance i, the base set R(i) keeps only neighbors j of i
    whose own k1-neighborhood contains i. R(i) is then expanded by the
    half-size reciprocal set R(q, ceil(k1/2)) of every q in R(i) whose
    overlap with R(i) covers at least two thirds of that half set.
    """
    if dist.kind != EUCLIDEAN:
        raise ValueError(f"need euclidean distances, got {dist.kind!r}")
    n = dist.n
    if not 1 <= k1 < n:
        raise ValueError(f"k1 must satisfy 1 <= k1 < n, got k1={k1}, n={n}")

    near = _nearest_mask(dist.values, k1)
    recip = near & near.T

    k_half = -(-k1 // 2)
    near_h = _nearest_mask(dist.values, k_half)
    recip_h = near_h & near_h.T

    # overlap[i, q] = |R(i) & R_half(q)|, exact integer counts in float64
    rf = recip.astype(np.float64)
    rhf = recip_h.astype(np.float64)
    overlap = rf @ rhf.T
    half_sizes = rhf.sum(axis=1)
    expand = recip & (3.0 * overlap >= 2.0 * half_sizes[None, :])
    expanded = recip | ((expand.astype(np.float64) @ rhf) > 0.0)

    sets = tuple(np.flatnonzero(row) for row in expanded)
    return NeighborSets(k1=k1, sets=sets)


def jaccard_distance(neighbors: NeighborSets) -> DistanceMatrix:
    """Jaccard distance 1 - |Si & Sj| / |Si | Sj| between neighbor sets."""
    n = neighbors.n
    member = np.zeros((n, n), dtype=np.float64)
    for i, s in enumerate(neighbors.sets):
        member[i, s] = 1.0
    inter = member @ member.T
    sizes = member.sum(axis=1)
    union = sizes[:, None] + sizes[None, :] - inter
    values = 1.0 - inter / union
    np.fill_diagonal(values, 0.0)
    return DistanceMatrix(values, JACCARD)
