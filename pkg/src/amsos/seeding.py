"""Initial centroid selection for k-means.

Three strategies are provided:

* ``spss_seeds`` -- deterministic single-pass seeding. The first seed is the
  densest row (smallest total distance to every other row); the rest follow
  the k-means++ potential deterministically.
* ``kmeanspp_seeds`` -- classic randomized D^2 sampling.
* ``random_seeds`` -- ``k`` distinct rows drawn uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset, pairwise_distances
from .errors import DegenerateSeedError
from .synthetic import Rng, as_rng

METHODS = ("spss", "kmeanspp", "random")
SPSS_RULES = ("potential", "farthest")


@dataclass(frozen=True, eq=False)
class SeedSet:
    centroids: np.ndarray
    method: str
    source_indices: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.source_indices)) != len(self.source_indices):
            raise DegenerateSeedError("seed rows must be distinct")
        if self.method not in METHODS:
            raise ValueError(f"unknown seeding method {self.method!r}")
        centroids = np.array(self.centroids, dtype=np.float64)
        centroids.setflags(write=False)
        object.__setattr__(self, "centroids", centroids)
        object.__setattr__(self, "source_indices", tuple(int(i) for i in self.source_indices))

    @classmethod
    def from_rows(cls, data: Dataset, indices, method: str) -> "SeedSet":
        indices = [int(i) for i in indices]
        return cls(data.points[indices].copy(), method, tuple(indices))

    @property
    def k(self) -> int:
        return len(self.source_indices)

    def __eq__(self, other):
        if not isinstance(other, SeedSet):
            return NotImplemented
        return (
            self.method == other.method
            and self.source_indices == other.source_indices
            and np.array_equal(self.centroids, other.centroids)
        )

    __hash__ = None


def _check_k(data: Dataset, k: int, lower: int = 1) -> None:
    if not lower <= k <= data.m:
        raise ValueError(f"k must lie in [{lower}, {data.m}], got {k}")


def _total_distances(distances: np.ndarray) -> list[float]:
    # fsum is exactly rounded, so the totals do not depend on row order
    return [math.fsum(row) for row in distances]


def _potentials(nearest_sq: np.ndarray, sq: np.ndarray) -> np.ndarray:
    # summing sorted terms makes each total independent of row order, so
    # symmetric candidates tie exactly and the lowest index wins
    return np.sort(np.minimum(nearest_sq[None, :], sq), axis=1).sum(axis=1)


def spss_seeds(data: Dataset, k: int, rule: str = "potential") -> SeedSet:
    """Deterministic seeding; no randomness anywhere.

    Seed 1 is the row with the smallest total Euclidean distance to all other
    rows. Each further seed is chosen among all rows by ``rule``:

    ``"potential"``
        the row that, once added, minimises the k-means++ potential
        ``sum_x D(x)^2`` (D = distance to the nearest chosen seed). This is the
        greedy, outlier-resistant choice used by AMSOS.
    ``"farthest"``
        the row maximising ``D(x)^2`` (farthest-point traversal).

    Ties go to the lowest row index.
    """
    _check_k(data, k)
    if rule not in SPSS_RULES:
        raise ValueError(f"unknown SPSS rule {rule!r}; choose from {SPSS_RULES}")
    dist = pairwise_distances(data.points)
    totals = _total_distances(dist)
    chosen = [min(range(data.m), key=lambda i: (totals[i], i))]
    nearest_sq = dist[chosen[0]] ** 2
    sq = dist**2 if rule == "potential" else None

    for _ in range(1, k):
        if not np.any(nearest_sq > 0):
            raise DegenerateSeedError(f"fewer than {k} distinct rows; cannot place seed {len(chosen) + 1}")
        if rule == "potential":
            potential = _potentials(nearest_sq, sq)
            nxt = int(np.argmin(potential))
        else:
            nxt = int(np.argmax(nearest_sq))
        chosen.append(nxt)
        nearest_sq = np.minimum(nearest_sq, dist[nxt] ** 2)
    return SeedSet.from_rows(data, chosen, "spss")


def kmeanspp_seeds(data: Dataset, k: int, rng: Rng) -> SeedSet:
    """k-means++: uniform first seed, then rows sampled with probability ~ D(x)^2."""
    _check_k(data, k)
    rng = as_rng(rng)
    points = data.points
    chosen = [int(rng.integers(data.m))]
    nearest_sq = np.sum((points - points[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = nearest_sq.sum()
        if total <= 0:
            raise DegenerateSeedError(f"fewer than {k} distinct rows; cannot place seed {len(chosen) + 1}")
        nxt = int(rng.choice(data.m, p=nearest_sq / total))
        chosen.append(nxt)
        nearest_sq = np.minimum(nearest_sq, np.sum((points - points[nxt]) ** 2, axis=1))
    return SeedSet.from_rows(data, chosen, "kmeanspp")


def random_seeds(data: Dataset, k: int, rng: Rng) -> SeedSet:
    _check_k(data, k)
    indices = as_rng(rng).choice(data.m, size=k, replace=False)
    return SeedSet.from_rows(data, indices, "random")


def make_seeds(method: str, data: Dataset, k: int, rng: Rng = None) -> SeedSet:
    """Dispatch on a method tag from :data:`METHODS`."""
    if method == "spss":
        return spss_seeds(data, k)
    if method == "kmeanspp":
        return kmeanspp_seeds(data, k, rng)
    if method == "random":
        return random_seeds(data, k, rng)
    raise ValueError(f"unknown seeding method {method!r}; choose from {METHODS}")
