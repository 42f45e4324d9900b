"""Automatic merging for a single optimal solution (AMSOS).

The driver over-clusters with k-means at ``kmax = floor(sqrt(m))`` and then
repeatedly folds the least populated clusters into their nearest neighbour
(average linkage), keeping a merge only when it raises the Rand index against
the reference labels. After a pass that changed k, the data are re-seeded and
re-clustered at the smaller k; a pass without merges ends the run.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .data import Dataset, Partition, pairwise_distances
from .errors import EmptyClusterError, MissingReferenceError
from .kmeans import KmeansConfig, lloyd
from .metrics import ContingencyTable
from .seeding import spss_seeds


def kmax_for(m: int) -> int:
    """Initial cluster count: ``floor(sqrt(m))``, never below 2."""
    if m < 4:
        raise ValueError(f"AMSOS needs at least 4 points, got m={m}")
    return max(2, math.isqrt(m))


def cluster_probability(cluster_size: int, m: int) -> float:
    if cluster_size < 1:
        raise EmptyClusterError("an empty cluster has no probability")
    if cluster_size > m:
        raise ValueError(f"cluster of {cluster_size} points cannot exceed m={m}")
    return cluster_size / m


def average_linkage(ci, cj) -> float:
    """Mean Euclidean distance over all cross pairs of two point sets."""
    ci = np.atleast_2d(np.asarray(ci, dtype=np.float64))
    cj = np.atleast_2d(np.asarray(cj, dtype=np.float64))
    if ci.shape[0] == 0 or cj.shape[0] == 0 or ci.size == 0 or cj.size == 0:
        raise EmptyClusterError("average linkage needs two non-empty clusters")
    return float(pairwise_distances(ci, cj).mean())


def closest_cluster(partition: Partition, victim: int, data: Dataset, distances: np.ndarray | None = None) -> int:
    """Cluster with the smallest average-linkage distance to ``victim``.

    ``distances`` may hold the precomputed ``m x m`` distance matrix of
    ``data``. Ties go to the lowest cluster id.
    """
    if partition.k < 2:
        raise ValueError("need at least two clusters to find a neighbour")
    if not 0 <= victim < partition.k:
        raise ValueError(f"cluster {victim} does not exist (k={partition.k})")
    members = partition.assignments == victim
    if distances is None:
        rows = pairwise_distances(data.points[members], data.points)
    else:
        rows = distances[members]
    to_points = rows.sum(axis=0)
    totals = np.bincount(partition.assignments, weights=to_points, minlength=partition.k)
    linkage = totals / (partition.sizes * partition.sizes[victim])
    linkage[victim] = np.inf
    return int(np.argmin(linkage))


def merge_clusters(partition: Partition, victim: int, target: int, data: Dataset | None = None) -> Partition:
    """Fold ``victim`` into ``target`` and compact ids to ``0..k-2``.

    The merged centroid is recomputed from the member points when ``data`` is
    given, otherwise as the size-weighted mean of the two centroids.
    """
    k = partition.k
    if victim == target or not (0 <= victim < k and 0 <= target < k):
        raise ValueError(f"cannot merge cluster {victim} into {target} (k={k})")
    labels = partition.assignments.copy()
    labels[labels == victim] = target
    labels[labels > victim] -= 1
    new_target = target - 1 if target > victim else target

    centroids = np.delete(partition.centroids, victim, axis=0)
    if data is not None:
        centroids[new_target] = data.points[labels == new_target].mean(axis=0)
    else:
        nv, nt = partition.sizes[victim], partition.sizes[target]
        centroids[new_target] = (nv * partition.centroids[victim] + nt * partition.centroids[target]) / (nv + nt)
    return Partition(labels, centroids)


@dataclass(frozen=True)
class AmsosConfig:
    kmax_override: int | None = None
    kmeans: KmeansConfig = field(default_factory=KmeansConfig)
    reference: str = "dataset_labels"

    def __post_init__(self):
        if self.reference != "dataset_labels":
            raise ValueError(f"unsupported Rand-index reference {self.reference!r}")


@dataclass(frozen=True)
class MergeAttempt:
    victim_cluster: int
    target_cluster: int
    ri_before: float
    ri_after: float
    accepted: bool


@dataclass(frozen=True)
class PassRecord:
    """One merge pass. Cluster ids are those of the k-means partition the pass started from."""

    k_seeded: int
    k_before: int
    ri_start: float
    merges_attempted: tuple[MergeAttempt, ...]
    k_after: int

    @property
    def accepted(self) -> int:
        return sum(a.accepted for a in self.merges_attempted)


@dataclass(frozen=True)
class AmsosTrace:
    iterations: tuple[PassRecord, ...]

    def to_jsonl(self) -> str:
        """One JSON object per pass, newline terminated."""
        return "".join(json.dumps(asdict(p)) + "\n" for p in self.iterations)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")

    @classmethod
    def from_jsonl(cls, text: str) -> "AmsosTrace":
        passes = []
        for line in text.splitlines():
            if not line.strip():
                continue
            raw = json.loads(line)
            raw["merges_attempted"] = tuple(MergeAttempt(**a) for a in raw["merges_attempted"])
            passes.append(PassRecord(**raw))
        return cls(tuple(passes))


@dataclass(frozen=True)
class AmsosResult:
    partition: Partition
    k_final: int
    rand_index: float
    trace: AmsosTrace
    kmax: int


def _rand(labels: np.ndarray, truth: np.ndarray) -> float:
    a, b, c, d = ContingencyTable.from_labels(labels, truth).pair_counts
    return (a + d) / (a + b + c + d)


def _merge_pass(data: Dataset, partition: Partition, truth, distances):
    """Give every cluster of ``partition`` one merge attempt, least probable first."""
    ri = _rand(partition.assignments, truth)
    start_ri = ri
    # pass-start id of the cluster currently stored at each position
    origin = list(range(partition.k))
    order = sorted(range(partition.k), key=lambda j: (partition.sizes[j], j))
    attempts = []
    for victim_id in order:
        if partition.k <= 2:
            break
        victim = origin.index(victim_id)
        target = closest_cluster(partition, victim, data, distances)
        candidate = merge_clusters(partition, victim, target, data)
        ri_new = _rand(candidate.assignments, truth)
        accepted = ri_new > ri
        attempts.append(MergeAttempt(victim_id, origin[target], ri, ri_new, accepted))
        if accepted:
            partition, ri = candidate, ri_new
            del origin[victim]
    return partition, ri, start_ri, tuple(attempts)


def amsos(data: Dataset, config: AmsosConfig | None = None) -> AmsosResult:
    """Cluster ``data`` without a preset k.

    Steps: seed ``kmax`` centroids deterministically and run k-means; compute
    the Rand index against ``data.labels``; try to merge each cluster (in
    increasing size order) into its average-linkage neighbour, committing only
    strict Rand-index improvements; if any merge was committed, re-seed and
    re-run k-means at the reduced k and repeat, otherwise stop.

    The whole procedure is deterministic. Merges never take k below 2.
    """
    config = config or AmsosConfig()
    if data.labels is None:
        raise MissingReferenceError("AMSOS gates merges on the Rand index and needs reference labels")
    if config.kmax_override is not None:
        if not 2 <= config.kmax_override <= data.m:
            raise ValueError(f"kmax_override must lie in [2, {data.m}]")
        k = config.kmax_override
    else:
        k = kmax_for(data.m)
    kmax = k

    distances = pairwise_distances(data.points)
    passes = []
    while True:
        result = lloyd(data, spss_seeds(data, k), config.kmeans)
        start = result.partition
        merged, ri, start_ri, attempts = _merge_pass(data, start, data.labels, distances)
        passes.append(PassRecord(k, start.k, start_ri, attempts, merged.k))
        if merged.k == start.k:
            break
        k = merged.k

    return AmsosResult(merged, merged.k, ri, AmsosTrace(tuple(passes)), kmax)
