"""Class-level prototype memory with a contrastive objective.

The bank stores exactly one prototype per cluster (K x dim values, no
per-instance state). Scoring an instance f against the bank uses the
temperature-scaled softmax over inner products; training updates move
the positive prototype toward f with momentum and renormalize it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dbscan import Clustering
from .embeddings import EmbeddingSet
from .errors import EmptyClusterError
from .selection import SelectionMask


@dataclass(frozen=True)
class MemoryBank:
    """K unit-norm prototypes plus the update hyperparameters.

    Args:
        prototypes: (K, dim) float64, one row per cluster.
        momentum: retained fraction of the old prototype per update.
        tau: softmax temperature.
    """

    prototypes: np.ndarray
    momentum: float
    tau: float

    def __post_init__(self):
        p = self.prototypes
        if not isinstance(p, np.ndarray) or p.ndim != 2:
            raise ValueError("prototypes must be a 2-D array")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError("need at least one prototype of positive dimension")
        if not 0.0 <= self.momentum <= 1.0:
            raise ValueError(f"momentum must lie in [0, 1], got {self.momentum}")
        if not self.tau > 0.0:
            raise ValueError(f"tau must be positive, got {self.tau}")

    @property
    def K(self) -> int:
        return self.prototypes.shape[0]

    @property
    def dim(self) -> int:
        return self.prototypes.shape[1]


def init_memory(
    embeddings: EmbeddingSet,
    clustering: Clustering,
    mask: SelectionMask,
    momentum: float,
    tau: float,
) -> MemoryBank:
    """Build prototypes as normalized means of each cluster's selected members.

    Raises EmptyClusterError if any cluster has no selected member; drop
    such clusters before calling.
    """
    if embeddings.n != clustering.n or embeddings.n != mask.n:
        raise ValueError(
            f"size mismatch: {embeddings.n} embeddings, {clustering.n} labels, {mask.n} mask entries"
        )
    if clustering.K < 1:
        raise ValueError("need at least one cluster")
    protos = np.zeros((clustering.K, embeddings.dim))
    for k in range(clustering.K):
        rows = np.flatnonzero((clustering.labels == k) & mask.selected)
        if rows.size == 0:
            raise EmptyClusterError(k)
        mean = embeddings.data[rows].mean(axis=0)
        norm = np.linalg.norm(mean)
        if norm < 1e-12:
            raise ValueError(f"cluster {k} mean has zero norm")
        protos[k] = mean / norm
    return MemoryBank(prototypes=protos, momentum=float(momentum), tau=float(tau))


def _check_index(bank: MemoryBank, pos: int):
    if not 0 <= pos < bank.K:
        raise IndexError(f"prototype index {pos} out of range [0, {bank.K})")


def contrastive_loss(f: np.ndarray, bank: MemoryBank, pos: int) -> float:
    """Negative log softmax probability of the positive prototype.

    Logits are <f, c_k> / tau; the log-sum-exp uses max subtraction, so
    the result is finite and non-negative for any finite inputs.
    """
    _check_index(bank, pos)
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (bank.dim,):
        raise ValueError(f"feature shape {f.shape} does not match dim {bank.dim}")
    logits = bank.prototypes @ f / bank.tau
    m = logits.max()
    lse = m + np.log(np.exp(logits - m).sum())
    return float(lse - logits[pos])


def contrastive_grad(f: np.ndarray, bank: MemoryBank, pos: int) -> np.ndarray:
    """Gradient of contrastive_loss with respect to f.

    Equals (1 / tau) * sum_k (p_k - [k == pos]) * c_k with p softmax
    probabilities of the logits.
    """
    _check_index(bank, pos)
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (bank.dim,):
        raise ValueError(f"feature shape {f.shape} does not match dim {bank.dim}")
    logits = bank.prototypes @ f / bank.tau
    p = np.exp(logits - logits.max())
    p /= p.sum()
    p[pos] -= 1.0
    return (p @ bank.prototypes) / bank.tau


def update_prototype(
    bank: MemoryBank, k: int, f: np.ndarray, renorm: bool = True
) -> MemoryBank:
    """Move prototype k toward f: c_k <- momentum * c_k + (1 - momentum) * f.

    The updated row is L2-renormalized unless renorm is False (ablation
    switch; disabling it lets prototype norms drift).
    """
    _check_index(bank, k)
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (bank.dim,):
        raise ValueError(f"feature shape {f.shape} does not match dim {bank.dim}")
    protos = bank.prototypes.copy()
    row = bank.momentum * protos[k] + (1.0 - bank.momentum) * f
    if renorm:
        norm = np.linalg.norm(row)
        if norm < 1e-12:
            raise ValueError(f"updated prototype {k} has zero norm")
        row = row / norm
    protos[k] = row
    return MemoryBank(prototypes=protos, momentum=bank.momentum, tau=bank.tau)
