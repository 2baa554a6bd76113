"""One desk-scale training epoch over a pair of embedding views.

run_epoch wires the whole pipeline together:

    1. pairwise distances per view (euclidean, optionally folded into
       jaccard over expanded reciprocal-neighbor sets),
    2. coarse density clustering plus silhouette-gated decomposition
       per view,
    3. cross-view agreement selection,
    4. clusters that lose every member are dropped and ids renumbered,
    5. a prototype bank is built from the selected members,
    6. one simulated sweep in index order accumulates the contrastive
       loss of each selected instance and applies its prototype update.

The sweep trains the bank only (no feature updates), and the report
labels the accumulated loss accordingly.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .dbscan import Clustering, remove_clusters
from .distances import DistanceMatrix, EUCLIDEAN, JACCARD, jaccard_distance, k_reciprocal_neighbors, pairwise_euclidean
from .embeddings import EmbeddingSet
from .errors import EmptySelectionError
from .fileio import dumps_json, _write_text
from .memory import MemoryBank, contrastive_loss, init_memory, update_prototype
from .metrics import nmi, purity
from .refine import refine_clusters
from .selection import SelectionMask, select_reliable

REPORT_SCHEMA_VERSION = 1
LOSS_SCOPE = "bank-only"


@dataclass(frozen=True)
class EpochConfig:
    """Hyperparameters of one epoch.

    Args:
        eps: coarse density radius d (the fine pass uses 2d/3).
        min_pts: density threshold, the point itself included.
        alpha: silhouette reliability threshold.
        beta: agreement threshold; kept instances need U > beta.
        sigma: between-epoch moving-average weight (used by the ema
            command when chaining epochs; run_epoch itself is one step).
        momentum: retained fraction in prototype updates.
        tau: contrastive temperature.
        k1: reciprocal-neighborhood size for jaccard distances.
        distance: "jaccard" or "euclidean".
        seed: echoed into reports for provenance.
    """

    eps: float = 0.6
    min_pts: int = 4
    alpha: float = 0.0
    beta: float = 0.8
    sigma: float = 0.999
    momentum: float = 0.2
    tau: float = 0.05
    k1: int = 30
    distance: str = JACCARD
    seed: int = 0

    def __post_init__(self):
        if not self.eps > 0.0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.min_pts < 1:
            raise ValueError(f"min_pts must be at least 1, got {self.min_pts}")
        if not -1.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [-1, 1], got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if not 0.0 <= self.sigma <= 1.0:
            raise ValueError(f"sigma must lie in [0, 1], got {self.sigma}")
        if not 0.0 <= self.momentum <= 1.0:
            raise ValueError(f"momentum must lie in [0, 1], got {self.momentum}")
        if not self.tau > 0.0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.k1 < 1:
            raise ValueError(f"k1 must be at least 1, got {self.k1}")
        if self.distance not in (EUCLIDEAN, JACCARD):
            raise ValueError(f"unknown distance kind {self.distance!r}")


@dataclass(frozen=True)
class EpochReport:
    """Summary statistics of one epoch."""

    k_coarse: int
    k_final: int
    decomposed: int
    selected_fraction: float
    nmi_vs_truth: float | None
    purity_selected: float | None
    purity_all: float | None
    mean_loss: float

    def __post_init__(self):
        if not 0.0 <= self.selected_fraction <= 1.0:
            raise ValueError("selected_fraction must lie in [0, 1]")
        for name in ("nmi_vs_truth", "purity_selected", "purity_all"):
            value = getattr(self, name)
            if value is not None and not -1e-9 <= value <= 1.0 + 1e-9:
                raise ValueError(f"{name} must lie in [0, 1]")


def view_distances(embeddings: EmbeddingSet, config: EpochConfig) -> DistanceMatrix:
    """Distance matrix for one view under the configured metric."""
    euclid = pairwise_euclidean(embeddings)
    if config.distance == EUCLIDEAN:
        return euclid
    return jaccard_distance(k_reciprocal_neighbors(euclid, config.k1))


def run_epoch(
    main: EmbeddingSet,
    mean: EmbeddingSet,
    config: EpochConfig,
    truth=None,
    renorm: bool = True,
):
    """Run one epoch; returns (clustering, mask, bank, report).

    truth enables the report's NMI and purity fields. renorm False
    disables prototype renormalization during the sweep (ablation).

    Raises EmptySelectionError when no instance survives selection.
    """
    if main.n != mean.n:
        raise ValueError(f"views disagree on n: {main.n} vs {mean.n}")
    if truth is not None:
        truth = np.asarray(truth, dtype=np.int64)
        if truth.shape != (main.n,):
            raise ValueError(f"truth length {truth.size} does not match n={main.n}")

    ref_main = refine_clusters(view_distances(main, config), config.eps, config.alpha, config.min_pts)
    ref_mean = refine_clusters(view_distances(mean, config), config.eps, config.alpha, config.min_pts)

    mask = select_reliable(ref_main.clustering, ref_mean.clustering, config.beta)
    n_selected = int(mask.selected.sum())
    if n_selected == 0:
        raise EmptySelectionError("no instance survived reliability selection")

    refined = ref_main.clustering
    emptied = [
        k
        for k in range(refined.K)
        if not mask.selected[refined.labels == k].any()
    ]
    final = remove_clusters(refined, emptied)

    bank = init_memory(main, final, mask, config.momentum, config.tau)
    total = 0.0
    for i in np.flatnonzero(mask.selected):
        k = int(final.labels[i])
        total += contrastive_loss(main.data[i], bank, k)
        bank = update_prototype(bank, k, main.data[i], renorm=renorm)

    report = EpochReport(
        k_coarse=ref_main.coarse.K,
        k_final=final.K,
        decomposed=len(ref_main.decomposed),
        selected_fraction=n_selected / main.n,
        nmi_vs_truth=None if truth is None else nmi(final.labels, truth),
        purity_selected=None if truth is None else purity(final.labels, truth, subset=mask.selected),
        purity_all=None if truth is None else purity(final.labels, truth),
        mean_loss=total / n_selected,
    )
    return final, mask, bank, report


def report_to_dict(report: EpochReport, config: EpochConfig) -> dict:
    """Versioned, order-stable dict form of a report (JSON-ready)."""
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "config": asdict(config),
        **asdict(report),
        "loss_scope": LOSS_SCOPE,
    }


def write_report(path, report: EpochReport, config: EpochConfig):
    """Serialize a report to JSON with deterministic bytes."""
    _write_text(path, dumps_json(report_to_dict(report, config)))
