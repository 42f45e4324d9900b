"""External and internal cluster validity indices.

External indices (Rand, adjusted Rand, Hubert, error rate) compare two
labelings through their contingency table. Internal indices (silhouette,
Davies-Bouldin, CS) look only at the geometry of one partition. All distances
are Euclidean.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, fields

import numpy as np
from scipy.optimize import linear_sum_assignment

from .data import Dataset, Partition, pairwise_distances
from .errors import DegeneratePartitionError, DimensionError

# Column order of the benchmark reports.
REPORT_COLUMNS = ("ari", "ri", "hi", "silhouette", "db", "cs", "error_rate_percent")
REPORT_HEADERS = ("ARI", "RI", "HI", "SIL", "DB", "CS", "err")
# True when a larger value is better.
HIGHER_IS_BETTER = {
    "ari": True,
    "ri": True,
    "hi": True,
    "silhouette": True,
    "db": False,
    "cs": False,
    "error_rate_percent": False,
}


def _pairs(n):
    return n * (n - 1) // 2


def _as_labels(labeling) -> np.ndarray:
    if isinstance(labeling, Partition):
        return labeling.assignments
    labels = np.asarray(labeling)
    if labels.ndim != 1:
        raise DimensionError("a labeling must be one-dimensional")
    return labels


def _codes(labels: np.ndarray) -> np.ndarray:
    """Non-negative integer codes for a labeling of any hashable dtype."""
    if labels.dtype.kind in "iub" and labels.min() >= 0:
        return labels.astype(np.int64)
    return np.unique(labels, return_inverse=True)[1].reshape(-1)


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Co-occurrence counts ``counts[i, j]`` of predicted cluster i and true class j."""

    counts: np.ndarray

    @classmethod
    def from_labels(cls, pred, truth) -> "ContingencyTable":
        pred, truth = _as_labels(pred), _as_labels(truth)
        if pred.shape != truth.shape:
            raise DimensionError(f"labelings differ in length: {pred.size} vs {truth.size}")
        if pred.size < 2:
            raise ValueError("at least two points are needed to compare labelings")
        p, t = _codes(pred), _codes(truth)
        kp, kt = int(p.max()) + 1, int(t.max()) + 1
        counts = np.bincount(p * kt + t, minlength=kp * kt).reshape(kp, kt)
        # ids that never occur only add all-zero rows or columns
        counts = counts[counts.any(axis=1)][:, counts.any(axis=0)]
        return cls(counts.astype(np.int64))

    @property
    def m(self) -> int:
        return int(self.counts.sum())

    @property
    def pair_counts(self) -> tuple[int, int, int, int]:
        """``(a, b, c, d)`` over unordered point pairs.

        a: together in both, b: together only in the prediction,
        c: together only in the truth, d: apart in both.
        """
        # python ints keep the counts exact for any m
        together_both = sum(_pairs(int(v)) for v in self.counts.ravel())
        together_pred = sum(_pairs(int(v)) for v in self.counts.sum(axis=1))
        together_true = sum(_pairs(int(v)) for v in self.counts.sum(axis=0))
        total = _pairs(self.m)
        a = together_both
        b = together_pred - a
        c = together_true - a
        d = total - a - b - c
        return a, b, c, d


def rand_index(pred, truth) -> float:
    a, b, c, d = ContingencyTable.from_labels(pred, truth).pair_counts
    return (a + d) / (a + b + c + d)


def hubert_index(pred, truth) -> float:
    """Normalised Hubert statistic ``(agreements - disagreements) / pairs``, i.e. 2 RI - 1."""
    a, b, c, d = ContingencyTable.from_labels(pred, truth).pair_counts
    return ((a + d) - (b + c)) / (a + b + c + d)


def adjusted_rand(pred, truth) -> float:
    """Hubert-Arabie adjusted Rand index.

    When the expected and maximum index coincide (both labelings trivial in
    the same way) the result is 1.0 for identical labelings and 0.0 otherwise.
    """
    table = ContingencyTable.from_labels(pred, truth)
    return _ari_from_table(table)


def _ari_from_table(table: ContingencyTable) -> float:
    a, b, c, d = table.pair_counts
    total = a + b + c + d
    sum_pred, sum_true = a + b, a + c
    expected = sum_pred * sum_true / total
    maximum = (sum_pred + sum_true) / 2
    if maximum == expected:
        # b == c == 0 means both labelings induce the same pair relation
        return 1.0 if b == 0 and c == 0 else 0.0
    return (a - expected) / (maximum - expected)


def error_rate(pred, truth) -> float:
    """Percentage of points misclassified under the best one-to-one cluster/class map.

    The contingency table is zero-padded to square so that surplus clusters
    (or classes) are matched with nothing.
    """
    table = ContingencyTable.from_labels(pred, truth)
    return _error_rate_from_table(table)


def _error_rate_from_table(table: ContingencyTable) -> float:
    counts = table.counts
    size = max(counts.shape)
    square = np.zeros((size, size), dtype=np.int64)
    square[: counts.shape[0], : counts.shape[1]] = counts
    rows, cols = linear_sum_assignment(square, maximize=True)
    matched = int(square[rows, cols].sum())
    return 100.0 * (table.m - matched) / table.m


def _points(data) -> np.ndarray:
    return data.points if isinstance(data, Dataset) else np.asarray(data, dtype=np.float64)


def _geometry(data, partition):
    points = _points(data)
    labels = _as_labels(partition)
    if labels.shape != (points.shape[0],):
        raise DimensionError("one cluster label per point is required")
    _, labels = np.unique(labels, return_inverse=True)
    k = int(labels.max()) + 1
    if k < 2:
        raise DegeneratePartitionError("internal indices need at least two clusters")
    return points, labels, k


def _centroids(points, labels, k):
    return np.array([points[labels == j].mean(axis=0) for j in range(k)])


def _silhouette(dist: np.ndarray, labels: np.ndarray, k: int) -> float:
    sizes = np.bincount(labels, minlength=k)
    # sums[i, j]: total distance from point i to the members of cluster j
    sums = np.zeros((dist.shape[0], k))
    for j in range(k):
        sums[:, j] = dist[:, labels == j].sum(axis=1)
    own = sizes[labels]
    a = np.zeros(dist.shape[0])
    multi = own > 1
    a[multi] = sums[multi, labels[multi]] / (own[multi] - 1)
    means = sums / sizes[None, :]
    means[np.arange(dist.shape[0]), labels] = np.inf
    b = means.min(axis=1)
    s = np.zeros(dist.shape[0])
    denom = np.maximum(a, b)
    ok = multi & (denom > 0)
    s[ok] = (b[ok] - a[ok]) / denom[ok]
    return float(s.mean())


def silhouette(data, partition) -> float:
    """Mean silhouette width; points in singleton clusters score 0."""
    points, labels, k = _geometry(data, partition)
    return _silhouette(pairwise_distances(points), labels, k)


def _centroid_separation(centroids: np.ndarray) -> np.ndarray:
    sep = pairwise_distances(centroids)
    off = ~np.eye(len(centroids), dtype=bool)
    if np.any(sep[off] == 0):
        raise DegeneratePartitionError("two clusters share the same centroid")
    return sep


def davies_bouldin(data, partition) -> float:
    points, labels, k = _geometry(data, partition)
    centroids = _centroids(points, labels, k)
    scatter = np.array([np.linalg.norm(points[labels == j] - centroids[j], axis=1).mean() for j in range(k)])
    sep = _centroid_separation(centroids)
    ratio = (scatter[:, None] + scatter[None, :]) / np.where(sep == 0, np.inf, sep)
    np.fill_diagonal(ratio, -np.inf)
    return float(ratio.max(axis=1).mean())


def _cs(dist: np.ndarray, points: np.ndarray, labels: np.ndarray, k: int) -> float:
    spread = 0.0
    for j in range(k):
        members = labels == j
        spread += dist[np.ix_(members, members)].max(axis=1).mean()
    sep = _centroid_separation(_centroids(points, labels, k))
    np.fill_diagonal(sep, np.inf)
    return float(spread / sep.min(axis=1).sum())


def cs_measure(data, partition) -> float:
    """CS index: mean within-cluster diameter over nearest-centroid separation. Lower is better."""
    points, labels, k = _geometry(data, partition)
    return _cs(pairwise_distances(points), points, labels, k)


@dataclass(frozen=True)
class MetricReport:
    ari: float
    ri: float
    hi: float
    silhouette: float
    db: float
    cs: float
    error_rate_percent: float
    k: int

    def to_dict(self) -> dict:
        row = {name: getattr(self, name) for name in REPORT_COLUMNS}
        row["k"] = self.k
        return row

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv_row(self) -> str:
        out = io.StringIO()
        csv.writer(out, lineterminator="\n").writerow([repr(float(getattr(self, c))) for c in REPORT_COLUMNS])
        return out.getvalue()

    @classmethod
    def from_dict(cls, row: dict) -> "MetricReport":
        kwargs = {f.name: row[f.name] for f in fields(cls)}
        kwargs["k"] = int(kwargs["k"])
        for name in REPORT_COLUMNS:
            kwargs[name] = float(kwargs[name])
        return cls(**kwargs)


def full_report(data, partition, truth) -> MetricReport:
    """Every index of the benchmark report for one partition."""
    points, labels, k = _geometry(data, partition)
    table = ContingencyTable.from_labels(labels, truth)
    a, b, c, d = table.pair_counts
    total = a + b + c + d
    dist = pairwise_distances(points)
    return MetricReport(
        ari=_ari_from_table(table),
        ri=(a + d) / total,
        hi=((a + d) - (b + c)) / total,
        silhouette=_silhouette(dist, labels, k),
        db=davies_bouldin(points, labels),
        cs=_cs(dist, points, labels, k),
        error_rate_percent=_error_rate_from_table(table),
        k=k,
    )
