"""Partition quality metrics: normalized mutual information and purity."""
from __future__ import annotations

import numpy as np

from .dbscan import OUTLIER


def _expand_outliers(labels: np.ndarray) -> np.ndarray:
    """Give every outlier its own fresh singleton label."""
    labels = np.asarray(labels, dtype=np.int64)
    out = labels.copy()
    fresh = labels.max(initial=-1) + 1
    for i in np.flatnonzero(labels == OUTLIER):
        out[i] = fresh
        fresh += 1
    return out


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(labels_a, labels_b) -> float:
    """Normalized mutual information I(A;B) / sqrt(H(A) H(B)).

    Outliers (-1) are treated as distinct singleton clusters on each
    side. When both partitions have zero entropy they are identical
    single-cluster labelings and the score is 1; when exactly one side
    has zero entropy the score is 0.
    """
    a = _expand_outliers(np.asarray(labels_a, dtype=np.int64))
    b = _expand_outliers(np.asarray(labels_b, dtype=np.int64))
    if a.ndim != 1 or a.shape != b.shape:
        raise ValueError(f"label vectors must be 1-D and equal length, got {a.shape} vs {b.shape}")
    n = a.size
    if n == 0:
        raise ValueError("empty label vectors")

    _, a_idx = np.unique(a, return_inverse=True)
    _, b_idx = np.unique(b, return_inverse=True)
    ka = a_idx.max() + 1
    kb = b_idx.max() + 1
    table = np.zeros((ka, kb))
    np.add.at(table, (a_idx, b_idx), 1.0)
    row = table.sum(axis=1)
    col = table.sum(axis=0)

    ha = _entropy(row, n)
    hb = _entropy(col, n)
    if ha == 0.0 and hb == 0.0:
        return 1.0
    if ha == 0.0 or hb == 0.0:
        return 0.0

    nz = table > 0
    cells = table[nz]
    outer = (row[:, None] * col[None, :])[nz]
    mi = float((cells / n * np.log(n * cells / outer)).sum())
    mi = max(mi, 0.0)
    return mi / np.sqrt(ha * hb)


def purity(pred, truth, subset=None) -> float:
    """Majority-vote accuracy over clustered instances.

    Sums, over every cluster restricted to the subset, the count of its
    most common ground-truth id, divided by the number of clustered
    instances in the subset. Outliers never count.

    Args:
        pred: predicted labels, -1 marks outliers.
        truth: ground-truth ids, same length.
        subset: optional boolean mask restricting the evaluation.
    """
    pred = np.asarray(pred, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if pred.ndim != 1 or pred.shape != truth.shape:
        raise ValueError(f"label vectors must be 1-D and equal length, got {pred.shape} vs {truth.shape}")
    keep = pred >= 0
    if subset is not None:
        subset = np.asarray(subset, dtype=bool)
        if subset.shape != pred.shape:
            raise ValueError(f"subset mask length {subset.size} does not match {pred.size}")
        keep &= subset
    if not keep.any():
        raise ValueError("no clustered instance in the subset")

    pred = pred[keep]
    truth = truth[keep]
    _, p_idx = np.unique(pred, return_inverse=True)
    _, t_idx = np.unique(truth, return_inverse=True)
    table = np.zeros((p_idx.max() + 1, t_idx.max() + 1))
    np.add.at(table, (p_idx, t_idx), 1.0)
    return float(table.max(axis=1).sum() / table.sum())
