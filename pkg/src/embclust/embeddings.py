"""Embedding matrices with unit-norm rows."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteError, ZeroRowError

UNIT_NORM_TOL = 1e-6
ZERO_NORM_TOL = 1e-12


@dataclass(frozen=True)
class EmbeddingSet:
    """n row vectors of dimension dim, every row L2-normalized.

    The constructor validates; it does not rescale. Use
    :func:`validate_and_normalize` to build one from a raw matrix.
    """

    data: np.ndarray

    def __post_init__(self):
        d = self.data
        if not isinstance(d, np.ndarray) or d.ndim != 2:
            raise ValueError("data must be a 2-D array")
        if d.shape[0] < 1 or d.shape[1] < 1:
            raise ValueError(f"need at least one row and one column, got shape {d.shape}")
        if d.dtype != np.float64:
            raise ValueError(f"data must be float64, got {d.dtype}")
        if not np.isfinite(d).all():
            i, j = np.argwhere(~np.isfinite(d))[0]
            raise NonFiniteError(int(i), int(j))
        norms = np.linalg.norm(d, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_NORM_TOL)
        if bad.size:
            raise ValueError(
                f"row {bad[0]} has norm {norms[bad[0]]:.9g}; rows must be unit-norm"
            )

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


def validate_and_normalize(raw) -> EmbeddingSet:
    """Check a raw real matrix and L2-normalize each row.

    Args:
        raw: array-like of shape (n, dim).

    Returns:
        EmbeddingSet with every row rescaled to unit norm.

    Raises:
        NonFiniteError: some entry is NaN or infinite.
        ZeroRowError: some row norm is below 1e-12.
        ValueError: the input is not a non-empty 2-D matrix.
    """
    mat = np.asarray(raw, dtype=np.float64)
    if mat.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={mat.ndim}")
    if mat.shape[0] < 1 or mat.shape[1] < 1:
        raise ValueError(f"need at least one row and one column, got shape {mat.shape}")
    if not np.isfinite(mat).all():
        i, j = np.argwhere(~np.isfinite(mat))[0]
        raise NonFiniteError(int(i), int(j))
    norms = np.linalg.norm(mat, axis=1)
    bad = np.flatnonzero(norms < ZERO_NORM_TOL)
    if bad.size:
        raise ZeroRowError(int(bad[0]))
    return EmbeddingSet(mat / norms[:, None])
