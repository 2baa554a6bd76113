"""Exception types shared across the package."""
from __future__ import annotations


class MalformedFileError(ValueError):
    """An input file could not be parsed.

    ``offset`` is the byte position at which parsing failed (for text
    formats, the offset of the offending line).
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class UnsupportedVersionError(MalformedFileError):
    """The file magic names a format version this reader does not support."""


class ZeroRowError(ValueError):
    """A row of an embedding matrix has (near) zero norm and cannot be normalized."""

    def __init__(self, row: int):
        super().__init__(f"row {row} has zero norm")
        self.row = row


class NonFiniteError(ValueError):
    """An embedding matrix contains a NaN or infinity."""

    def __init__(self, row: int, col: int):
        super().__init__(f"non-finite value at ({row}, {col})")
        self.row = row
        self.col = col


class EmptyClusterError(ValueError):
    """A cluster lost every member to a selection mask.

    Callers must drop such clusters before building prototypes.
    """

    def __init__(self, cluster: int):
        super().__init__(f"cluster {cluster} has no selected member")
        self.cluster = cluster


class EmptySelectionError(RuntimeError):
    """No instance survived reliability selection."""
