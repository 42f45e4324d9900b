"""Lloyd's k-means iteration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, Partition
from .seeding import SeedSet

EMPTY_CLUSTER_POLICIES = ("respawn_farthest", "drop")


@dataclass(frozen=True)
class KmeansConfig:
    max_iterations: int = 300
    tolerance: float = 1e-6
    empty_cluster_policy: str = "respawn_farthest"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")
        if self.empty_cluster_policy not in EMPTY_CLUSTER_POLICIES:
            raise ValueError(f"unknown empty-cluster policy {self.empty_cluster_policy!r}")


@dataclass(frozen=True)
class KmeansResult:
    partition: Partition
    iterations_used: int
    converged: bool
    sse: float
    sse_history: tuple[float, ...] = ()


def assign(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Index of the nearest centroid for every point; ties go to the lowest id."""
    sq = np.empty((points.shape[0], centroids.shape[0]))
    for j, c in enumerate(centroids):
        diff = points - c
        sq[:, j] = np.einsum("ij,ij->i", diff, diff)
    return np.argmin(sq, axis=1)


def _sse(points: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    diff = points - centroids[labels]
    return float(np.sum(diff * diff))


def _update(points, labels, centroids, policy):
    """Move centroids to member means and deal with clusters that lost all points.

    Returns ``(centroids, labels, changed_k)``. Under ``drop`` the empty
    clusters are removed and labels are compacted.
    """
    k = centroids.shape[0]
    counts = np.bincount(labels, minlength=k)
    new = centroids.copy()
    for j in np.flatnonzero(counts):
        new[j] = points[labels == j].mean(axis=0)
    empty = np.flatnonzero(counts == 0)
    if empty.size == 0:
        return new, labels, False
    if policy == "drop":
        keep = np.flatnonzero(counts)
        remap = np.full(k, -1)
        remap[keep] = np.arange(keep.size)
        return new[keep], remap[labels], True
    # respawn_farthest: the points farthest from their own centroid, one per empty cluster
    far = np.sum((points - centroids[labels]) ** 2, axis=1)
    order = np.argsort(-far, kind="stable")
    new[empty] = points[order[: empty.size]]
    return new, labels, True


def lloyd(data: Dataset, seeds: SeedSet | np.ndarray, config: KmeansConfig | None = None) -> KmeansResult:
    """Run Lloyd's algorithm from the given seeds.

    Each iteration assigns every point to its nearest centroid and then moves
    every centroid to the mean of its points. Iteration stops once no centroid
    coordinate moves by more than ``config.tolerance`` or after
    ``config.max_iterations`` rounds.

    Args:
        data: the points to cluster.
        seeds: a :class:`SeedSet` or a raw ``k x n`` array of starting centroids.
        config: stopping rule and empty-cluster handling.

    Returns:
        KmeansResult whose partition centroids are the exact means of the
        returned assignment. ``sse_history`` holds the objective after every
        update step and is non-increasing.
    """
    config = config or KmeansConfig()
    points = data.points
    centroids = np.array(seeds.centroids if isinstance(seeds, SeedSet) else seeds, dtype=np.float64)
    if centroids.ndim != 2 or centroids.shape[1] != data.n:
        raise ValueError(f"seed centroids must be k x {data.n}, got shape {centroids.shape}")
    if centroids.shape[0] > data.m:
        raise ValueError(f"k={centroids.shape[0]} exceeds the number of points m={data.m}")

    history: list[float] = []
    converged = False
    iterations = 0
    while iterations < config.max_iterations:
        iterations += 1
        labels = assign(points, centroids)
        new, labels, disturbed = _update(points, labels, centroids, config.empty_cluster_policy)
        shift = np.inf if new.shape != centroids.shape else float(np.max(np.abs(new - centroids)))
        centroids = new
        history.append(_sse(points, labels, centroids))
        if shift <= config.tolerance and not disturbed:
            converged = True
            break

    # a respawn on the last permitted round leaves a centroid without members
    for _ in range(centroids.shape[0] + 1):
        if np.all(np.bincount(labels, minlength=centroids.shape[0]) > 0):
            break
        labels = assign(points, centroids)
        centroids, labels, _ = _update(points, labels, centroids, config.empty_cluster_policy)

    partition = Partition(labels, centroids)
    return KmeansResult(partition, iterations, converged, _sse(points, labels, centroids), tuple(history))
