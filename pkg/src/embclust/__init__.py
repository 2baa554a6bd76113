"""Uncertainty-aware pseudo-label clustering over embedding matrices.

The pipeline: reciprocal-neighbor Jaccard distances, deterministic
density clustering, silhouette-gated cluster decomposition, cross-view
reliable-instance selection, and a class-prototype memory bank with a
contrastive objective.
"""
from .dbscan import OUTLIER, Clustering, canonicalize, dbscan, remove_clusters
from .distances import (
    DistanceMatrix,
    NeighborSets,
    jaccard_distance,
    k_reciprocal_neighbors,
    pairwise_euclidean,
)
from .embeddings import EmbeddingSet, validate_and_normalize
from .epoch import EpochConfig, EpochReport, run_epoch, write_report
from .errors import (
    EmptyClusterError,
    EmptySelectionError,
    MalformedFileError,
    NonFiniteError,
    UnsupportedVersionError,
    ZeroRowError,
)
from .fileio import read_embeddings, write_embeddings
from .memory import (
    MemoryBank,
    contrastive_grad,
    contrastive_loss,
    init_memory,
    update_prototype,
)
from .metrics import nmi, purity
from .refine import RefineResult, hierarchical_cluster, refine_clusters
from .selection import SelectionMask, ema_update, instance_uncertainty, select_reliable
from .silhouette import (
    SilhouetteReport,
    cluster_silhouette,
    instance_silhouette,
    inter_distance,
    intra_distance,
)
from .synth import SynthConfig, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "OUTLIER",
    "Clustering",
    "DistanceMatrix",
    "EmbeddingSet",
    "EmptyClusterError",
    "EmptySelectionError",
    "EpochConfig",
    "EpochReport",
    "MalformedFileError",
    "MemoryBank",
    "NeighborSets",
    "NonFiniteError",
    "RefineResult",
    "SelectionMask",
    "SilhouetteReport",
    "SynthConfig",
    "UnsupportedVersionError",
    "ZeroRowError",
    "canonicalize",
    "cluster_silhouette",
    "contrastive_grad",
    "contrastive_loss",
    "dbscan",
    "ema_update",
    "generate_synthetic",
    "hierarchical_cluster",
    "init_memory",
    "instance_silhouette",
    "instance_uncertainty",
    "inter_distance",
    "intra_distance",
    "jaccard_distance",
    "k_reciprocal_neighbors",
    "nmi",
    "pairwise_euclidean",
    "purity",
    "read_embeddings",
    "refine_clusters",
    "remove_clusters",
    "run_epoch",
    "select_reliable",
    "update_prototype",
    "validate_and_normalize",
    "write_embeddings",
    "write_report",
]
