"""Datasets, partitions, Euclidean geometry helpers and CSV ingestion."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DimensionError, EmptyClusterError, EmptyDatasetError, IngestionError

LabelColumn = Union[int, str, None]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Dataset:
    """An ``m x n`` matrix of raw features with optional reference labels.

    Labels, when present, are contiguous class ids ``0..C-1``. Both arrays are
    made read-only on construction.
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    name: str = "dataset"

    def __post_init__(self):
        points = np.array(self.points, dtype=np.float64)
        if points.ndim != 2:
            raise DimensionError(f"points must be a 2-d matrix, got shape {points.shape}")
        m, n = points.shape
        if m < 2:
            raise ValueError(f"a dataset needs at least 2 rows, got {m}")
        if n < 1:
            raise ValueError("a dataset needs at least 1 feature column")
        if not np.all(np.isfinite(points)):
            raise ValueError("dataset contains non-finite feature values")
        object.__setattr__(self, "points", _frozen(points))

        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != (m,):
                raise DimensionError(f"expected {m} labels, got shape {labels.shape}")
            labels = labels.astype(np.int64)
            if labels.min() < 0 or set(np.unique(labels)) != set(range(int(labels.max()) + 1)):
                raise ValueError("labels must be contiguous class ids starting at 0")
            object.__setattr__(self, "labels", _frozen(labels))

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def n_classes(self) -> int | None:
        return None if self.labels is None else int(self.labels.max()) + 1

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        if self.name != other.name or not np.array_equal(self.points, other.points):
            return False
        if self.labels is None or other.labels is None:
            return self.labels is None and other.labels is None
        return np.array_equal(self.labels, other.labels)

    __hash__ = None

    def zscore(self) -> "Dataset":
        """Return a copy with every feature centred and scaled to unit variance.

        Constant columns are only centred.
        """
        mean = self.points.mean(axis=0)
        std = self.points.std(axis=0)
        std[std == 0] = 1.0
        return Dataset((self.points - mean) / std, self.labels, self.name)


@dataclass(frozen=True, eq=False)
class Partition:
    """Hard assignment of ``m`` points to ``k`` non-empty clusters."""

    assignments: np.ndarray
    centroids: np.ndarray
    sizes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        assignments = np.array(self.assignments, dtype=np.int64)
        centroids = np.array(self.centroids, dtype=np.float64)
        if assignments.ndim != 1:
            raise DimensionError("assignments must be a 1-d array")
        if centroids.ndim != 2:
            raise DimensionError("centroids must be a k x n matrix")
        k = centroids.shape[0]
        if assignments.size and (assignments.min() < 0 or assignments.max() >= k):
            raise ValueError(f"cluster ids must lie in [0, {k})")
        sizes = np.bincount(assignments, minlength=k)
        if np.any(sizes == 0):
            empty = int(np.flatnonzero(sizes == 0)[0])
            raise EmptyClusterError(f"cluster {empty} has no points")
        object.__setattr__(self, "assignments", _frozen(assignments))
        object.__setattr__(self, "centroids", _frozen(centroids))
        object.__setattr__(self, "sizes", _frozen(sizes))

    @classmethod
    def from_assignments(cls, points: np.ndarray, assignments: Sequence[int]) -> "Partition":
        """Build a partition whose centroids are the means of the assigned points."""
        points = np.asarray(points, dtype=np.float64)
        assignments = np.asarray(assignments, dtype=np.int64)
        if assignments.shape != (points.shape[0],):
            raise DimensionError("one assignment per point is required")
        k = int(assignments.max()) + 1
        centroids = np.empty((k, points.shape[1]))
        for j in range(k):
            centroids[j] = centroid_of(points[assignments == j])
        return cls(assignments, centroids)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    @property
    def m(self) -> int:
        return self.assignments.shape[0]

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == cluster)

    def sse(self, points: np.ndarray) -> float:
        """Within-cluster sum of squared distances to the own centroid."""
        diff = np.asarray(points) - self.centroids[self.assignments]
        return float(np.sum(diff * diff))

    def check_centroids(self, points: np.ndarray, rtol: float = 1e-9) -> bool:
        """True when every centroid is the mean of its members to ``rtol``."""
        expected = Partition.from_assignments(points, self.assignments).centroids
        scale = max(1.0, float(np.max(np.abs(expected))))
        return bool(np.max(np.abs(expected - self.centroids)) <= rtol * scale)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.assignments, other.assignments) and np.array_equal(
            self.centroids, other.centroids
        )

    __hash__ = None


def euclidean_distance(a: Sequence[float], b: Sequence[float]) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionError(f"cannot compare vectors of shapes {a.shape} and {b.shape}")
    diff = a - b
    return math.sqrt(float(np.dot(diff, diff)))


def pairwise_distances(x: np.ndarray, y: np.ndarray | None = None) -> np.ndarray:
    """Euclidean distance matrix between the rows of ``x`` and ``y`` (default ``x``)."""
    x = np.asarray(x, dtype=np.float64)
    return cdist(x, x if y is None else np.asarray(y, dtype=np.float64))


def centroid_of(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] == 0:
        raise EmptyClusterError("cannot take the centroid of an empty set of points")
    return points.mean(axis=0)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _resolve_label_column(label_column: LabelColumn, width: int) -> int | None:
    if label_column is None:
        return None
    if isinstance(label_column, str):
        if label_column.lower() == "last":
            return width - 1
        if label_column.lower() == "none":
            return None
        try:
            label_column = int(label_column)
        except ValueError:
            raise IngestionError(f"unknown label column selector {label_column!r}") from None
    index = label_column + width if label_column < 0 else label_column
    if not 0 <= index < width:
        raise IngestionError(f"label column {label_column} is outside a {width}-column file")
    return index


def load_csv(path: str | Path, label_column: LabelColumn = None, name: str | None = None) -> Dataset:
    """Read a comma-separated file into a :class:`Dataset`.

    Args:
        path: UTF-8 CSV file. Blank lines are skipped.
        label_column: ``None`` for unlabeled data, a column index (negative
            indices count from the end) or ``"last"``.
        name: dataset name; defaults to the file stem.

    A first row holding any non-numeric cell outside the label column is
    treated as a header. Labels are re-indexed to ``0..C-1`` in order of first
    appearance.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        rows = [
            (lineno, [cell.strip() for cell in row])
            for lineno, row in enumerate(csv.reader(handle), start=1)
            if row and any(cell.strip() for cell in row)
        ]
    if not rows:
        raise EmptyDatasetError(f"{path} contains no data")

    width = len(rows[0][1])
    label_idx = _resolve_label_column(label_column, width)
    feature_cols = [c for c in range(width) if c != label_idx]
    if not feature_cols:
        raise IngestionError(f"{path} has no feature columns")

    if any(not _is_number(rows[0][1][c]) for c in feature_cols):
        rows = rows[1:]
        if not rows:
            raise EmptyDatasetError(f"{path} contains a header but no data")

    features = np.empty((len(rows), len(feature_cols)))
    raw_labels = []
    for i, (lineno, cells) in enumerate(rows):
        if len(cells) != width:
            raise IngestionError(f"expected {width} cells, found {len(cells)}", row=lineno)
        for j, c in enumerate(feature_cols):
            try:
                value = float(cells[c])
            except ValueError:
                raise IngestionError(f"non-numeric feature {cells[c]!r}", row=lineno, column=c + 1) from None
            if not math.isfinite(value):
                raise IngestionError(f"non-finite feature {cells[c]!r}", row=lineno, column=c + 1)
            features[i, j] = value
        if label_idx is not None:
            raw_labels.append(cells[label_idx])

    labels = None
    if label_idx is not None:
        class_ids: dict[str, int] = {}
        labels = np.array([class_ids.setdefault(v, len(class_ids)) for v in raw_labels], dtype=np.int64)

    if features.shape[0] < 2:
        raise IngestionError(f"{path} needs at least 2 data rows, found {features.shape[0]}")
    return Dataset(features, labels, name or path.stem)


def save_csv(dataset: Dataset, path: str | Path) -> None:
    """Write features at 17 significant digits, labels (if any) in the last column."""
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        for i, row in enumerate(dataset.points):
            cells = [format(float(v), ".17g") for v in row]
            if dataset.labels is not None:
                cells.append(str(int(dataset.labels[i])))
            writer.writerow(cells)
