"""Exception types raised across the package."""

from __future__ import annotations


class AmsosError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(AmsosError, ValueError):
    """Vectors or matrices with incompatible shapes."""


class IngestionError(AmsosError, ValueError):
    """A dataset file could not be parsed.

    ``row`` and ``column`` are 1-based positions in the source file when known.
    """

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column {column}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.row = row
        self.column = column


class EmptyDatasetError(IngestionError):
    pass


class EmptyClusterError(AmsosError, ValueError):
    pass


class DegenerateSeedError(AmsosError, ValueError):
    """Not enough distinct rows to place the requested number of seeds."""


class MissingReferenceError(AmsosError, ValueError):
    """An operation needs reference labels and the dataset has none."""


class DegeneratePartitionError(AmsosError, ValueError):
    """A validity index is undefined for the partition (e.g. coincident centroids)."""


class SpecValidationError(AmsosError, ValueError):
    """A benchmark run request violates its invariants."""
