"""Multivariate-normal mixtures used as reproducible clustering benchmarks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import DimensionError

Rng = np.random.Generator | int | None


def as_rng(rng: Rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True, eq=False)
class GaussianComponent:
    """One mixture component ``N(mean, covariance)`` contributing ``count`` points."""

    mean: np.ndarray
    covariance: np.ndarray
    count: int

    def __post_init__(self):
        mean = np.array(self.mean, dtype=np.float64)
        cov = np.array(self.covariance, dtype=np.float64)
        if mean.ndim != 1 or cov.shape != (mean.size, mean.size):
            raise DimensionError(f"covariance shape {cov.shape} does not match mean of length {mean.size}")
        if not np.allclose(cov, cov.T, rtol=0, atol=1e-12):
            raise ValueError("covariance must be symmetric")
        if self.count < 1:
            raise ValueError("a component needs at least one point")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)
        # fails fast on a non positive-definite covariance
        object.__setattr__(self, "_chol", np.linalg.cholesky(cov))

    @property
    def dimension(self) -> int:
        return self.mean.size

    @property
    def cholesky(self) -> np.ndarray:
        """Lower-triangular ``L`` with ``L @ L.T == covariance``."""
        return self._chol


@dataclass(frozen=True)
class MixtureSpec:
    name: str
    components: tuple[GaussianComponent, ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("a mixture needs at least one component")
        dims = {c.dimension for c in self.components}
        if len(dims) != 1:
            raise DimensionError(f"components disagree on dimension: {sorted(dims)}")

    @property
    def m(self) -> int:
        return sum(c.count for c in self.components)

    @property
    def n(self) -> int:
        return self.components[0].dimension

    @property
    def means(self) -> np.ndarray:
        return np.array([c.mean for c in self.components])


def sample_mvn(component: GaussianComponent, rng: Rng) -> np.ndarray:
    """Draw ``component.count`` rows ``mean + L z`` with ``z`` standard normal."""
    z = as_rng(rng).standard_normal((component.count, component.dimension))
    return component.mean + z @ component.cholesky.T


def _symmetric(upper) -> np.ndarray:
    """Mirror an upper-triangular covariance table into a full matrix."""
    upper = np.triu(np.array(upper, dtype=np.float64))
    return upper + np.triu(upper, 1).T


def _iso(variance: float) -> np.ndarray:
    return variance * np.eye(2)


# (mean, upper-triangular covariance) per component, and the total point count.
_BUILTINS = {
    "synthetic1": (
        350,
        [
            ((2, 3, 4), [[1, 0.50, 0.3333], [0, 1, 0.6667], [0, 0, 1]]),
            ((7, 6, 9), [[1, 1, 1], [0, 2, 2], [0, 0, 3]]),
        ],
    ),
    # declared with n=3 in the source tables, but every listed vector is 2-d
    "synthetic2": (
        400,
        [
            ((-1, -1), _iso(0.65)),
            ((2, 2), [[1, 0.7], [0, 1]]),
            ((-3, 3), _iso(0.78)),
            ((-6, 4), _iso(0.5)),
        ],
    ),
    "synthetic3": (
        300,
        [
            ((-1, -1), _iso(1.0)),
            ((2, 2), _iso(1.0)),
            ((-3, 3), _iso(0.7)),
        ],
    ),
    "synthetic4": (
        800,
        [
            ((-1, -1), _iso(0.65)),
            ((-8, -6), [[1, 0.7], [0, 1]]),
            ((-3, 6), _iso(0.2)),
            ((-8, 14), _iso(0.5)),
            ((10, 12), _iso(0.3)),
            ((14, -14), _iso(0.1)),
        ],
    ),
}

BUILTIN_IDS = tuple(_BUILTINS)


def builtin_mixture(mixture_id: str) -> MixtureSpec:
    """Return one of the four benchmark mixtures, split evenly between components."""
    try:
        total, table = _BUILTINS[mixture_id]
    except KeyError:
        raise ValueError(f"unknown builtin mixture {mixture_id!r}; choose from {', '.join(BUILTIN_IDS)}") from None
    base, extra = divmod(total, len(table))
    components = tuple(
        GaussianComponent(mean, _symmetric(cov), base + (1 if i < extra else 0))
        for i, (mean, cov) in enumerate(table)
    )
    return MixtureSpec(mixture_id, components)


def generate(spec: MixtureSpec, seed: int) -> Dataset:
    """Realise ``spec`` with a fixed seed; labels are component indices."""
    rng = np.random.default_rng(seed)
    blocks = [sample_mvn(component, rng) for component in spec.components]
    labels = np.repeat(np.arange(len(spec.components)), [c.count for c in spec.components])
    return Dataset(np.vstack(blocks), labels, spec.name)
