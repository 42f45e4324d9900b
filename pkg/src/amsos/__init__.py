"""AMSOS: automatic merging for a single optimal clustering solution.

Deterministic k-means over-clustering followed by Rand-index-gated merging
of low-probability clusters, plus the validity indices and benchmark harness
used to evaluate it.
"""

from .data import Dataset, Partition, centroid_of, euclidean_distance, load_csv, save_csv
from .engine import AmsosConfig, AmsosResult, AmsosTrace, amsos, kmax_for
from .kmeans import KmeansConfig, KmeansResult, lloyd
from .metrics import (
    MetricReport,
    adjusted_rand,
    cs_measure,
    davies_bouldin,
    error_rate,
    full_report,
    hubert_index,
    rand_index,
    silhouette,
)
from .seeding import SeedSet, kmeanspp_seeds, random_seeds, spss_seeds
from .synthetic import builtin_mixture, generate

__all__ = [
    "AmsosConfig",
    "AmsosResult",
    "AmsosTrace",
    "Dataset",
    "KmeansConfig",
    "KmeansResult",
    "MetricReport",
    "Partition",
    "SeedSet",
    "adjusted_rand",
    "amsos",
    "builtin_mixture",
    "centroid_of",
    "cs_measure",
    "davies_bouldin",
    "error_rate",
    "euclidean_distance",
    "full_report",
    "generate",
    "hubert_index",
    "kmax_for",
    "kmeanspp_seeds",
    "lloyd",
    "load_csv",
    "random_seeds",
    "rand_index",
    "save_csv",
    "silhouette",
    "spss_seeds",
]

__version__ = "0.1.0"
