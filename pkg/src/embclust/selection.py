"""Cross-view agreement scoring and reliable-instance selection.

The main model and its temporal mean produce one clustering each. An
instance is trusted when the mean view keeps it together with most of
its main-view cluster: with i in main cluster I_k and mean cluster
I'_l, the agreement score is U(i) = |I_k & I'_l| / |I_k|. Instances
that are outliers in either view score 0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dbscan import OUTLIER, Clustering


@dataclass(frozen=True)
class SelectionMask:
    """Agreement scores and the boolean keep mask they induce."""

    uncertainty: np.ndarray
    selected: np.ndarray
    beta: float

    def __post_init__(self):
        if self.uncertainty.shape != self.selected.shape:
            raise ValueError("uncertainty and selected must have the same length")
        if self.uncertainty.size and (
            self.uncertainty.min() < 0.0 or self.uncertainty.max() > 1.0
        ):
            raise ValueError("uncertainty values must lie in [0, 1]")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")

    @property
    def n(self) -> int:
        return self.uncertainty.size


def ema_update(avg: np.ndarray, current: np.ndarray, sigma: float) -> np.ndarray:
    """Elementwise moving average sigma * avg + (1 - sigma) * current."""
    avg = np.asarray(avg, dtype=np.float64)
    current = np.asarray(current, dtype=np.float64)
    if avg.shape != current.shape:
        raise ValueError(f"shape mismatch: {avg.shape} vs {current.shape}")
    if not 0.0 <= sigma <= 1.0:
        raise ValueError(f"sigma must lie in [0, 1], got {sigma}")
    return sigma * avg + (1.0 - sigma) * current


def instance_uncertainty(main: Clustering, mean: Clustering, i: int) -> float:
    """Agreement score U(i) of one instance across the two clusterings."""
    if main.n != mean.n:
        raise ValueError(f"size mismatch: {main.n} vs {mean.n} instances")
    if not 0 <= i < main.n:
        raise IndexError(f"instance {i} out of range [0, {main.n})")
    k = int(main.labels[i])
    l = int(mean.labels[i])
    if k == OUTLIER or l == OUTLIER:
        return 0.0
    in_main = main.labels == k
    overlap = np.count_nonzero(in_main & (mean.labels == l))
    return overlap / np.count_nonzero(in_main)


def select_reliable(main: Clustering, mean: Clustering, beta: float) -> SelectionMask:
    """Keep main-view clustered instances whose agreement exceeds beta (strict)."""
    if main.n != mean.n:
        raise ValueError(f"size mismatch: {main.n} vs {mean.n} instances")
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")

    n = main.n
    uncertainty = np.zeros(n)
    both = (main.labels >= 0) & (mean.labels >= 0)
    if both.any() and main.K > 0 and mean.K > 0:
        counts = np.zeros((main.K, mean.K))
        np.add.at(counts, (main.labels[both], mean.labels[both]), 1.0)
        sizes = np.bincount(main.labels[main.labels >= 0], minlength=main.K)
        uncertainty[both] = (
            counts[main.labels[both], mean.labels[both]] / sizes[main.labels[both]]
        )
    selected = (main.labels >= 0) & (uncertainty > beta)
    return SelectionMask(uncertainty=uncertainty, selected=selected, beta=float(beta))
