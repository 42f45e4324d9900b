import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from amsos.data import Dataset
from amsos.kmeans import KmeansConfig, assign, lloyd
from amsos.metrics import error_rate
from amsos.seeding import spss_seeds
from amsos.synthetic import builtin_mixture, generate

LINE = Dataset([[0.0], [1.0], [9.0], [10.0]])


def test_seeds_at_means_are_a_fixed_point():
    d = Dataset([[0.0, 0], [0, 0], [5, 5], [5, 5]])
    res = lloyd(d, np.array([[0.0, 0], [5, 5]]))
    assert res.iterations_used == 1 and res.converged
    assert res.sse == 0
    np.testing.assert_array_equal(res.partition.assignments, [0, 0, 1, 1])


def test_line_matches_exhaustive_optimum():
    res = lloyd(LINE, np.array([[0.0], [10.0]]))
    np.testing.assert_allclose(res.partition.centroids.ravel(), [0.5, 9.5])
    assert res.sse == pytest.approx(1.0)
    pts = LINE.points
    best = min(oracles.sse(pts, lab) for lab in oracles.all_labelings(4, 2) if len(set(lab)) == 2)
    assert res.sse == pytest.approx(best)


def test_assign_breaks_ties_toward_lower_id():
    np.testing.assert_array_equal(assign(np.array([[5.0]]), np.array([[10.0], [0.0]])), [0])


def test_synthetic4_spss_recovers_every_component():
    spec = builtin_mixture("synthetic4")
    for seed in range(5):
        d = generate(spec, seed)
        res = lloyd(d, spss_seeds(d, 6))
        assert res.partition.k == 6
        assert error_rate(res.partition, d.labels) < 0.5, seed


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_sse_never_increases(seed, k):
    rng = np.random.default_rng(seed)
    d = Dataset(rng.normal(size=(30, 2)) * rng.uniform(0.5, 5))
    seeds = d.points[rng.choice(30, k, replace=False)]
    res = lloyd(d, seeds)
    hist = np.array(res.sse_history)
    assert np.all(np.diff(hist) <= 1e-9 * max(1.0, hist[0]))
    assert res.sse == pytest.approx(hist[-1])


@given(st.integers(0, 2**32 - 1))
def test_centroids_are_member_means(seed):
    rng = np.random.default_rng(seed)
    d = Dataset(rng.normal(size=(25, 3)))
    res = lloyd(d, spss_seeds(d, 4))
    assert res.partition.check_centroids(d.points)
    assert np.all(res.partition.sizes > 0)


def test_rerun_from_converged_centroids_is_idempotent(random_dataset):
    d = random_dataset(5, m=60)
    first = lloyd(d, spss_seeds(d, 3))
    assert first.converged
    second = lloyd(d, first.partition.centroids)
    assert second.iterations_used == 1
    assert second.partition == first.partition


def test_max_iterations_caps_the_loop(random_dataset):
    d = random_dataset(6, m=80)
    res = lloyd(d, d.points[:5], KmeansConfig(max_iterations=1))
    assert res.iterations_used == 1
    assert not res.converged


def test_empty_cluster_is_respawned():
    # the third seed is far from everything and loses its points at once
    d = Dataset([[0.0], [0.1], [0.2], [5.0], [5.1], [5.2]])
    res = lloyd(d, np.array([[0.0], [5.0], [100.0]]))
    assert res.partition.k == 3
    assert np.all(res.partition.sizes > 0)


def test_empty_cluster_is_dropped():
    d = Dataset([[0.0], [0.1], [0.2], [5.0], [5.1], [5.2]])
    res = lloyd(d, np.array([[0.0], [5.0], [100.0]]), KmeansConfig(empty_cluster_policy="drop"))
    assert res.partition.k == 2
    np.testing.assert_allclose(res.partition.centroids.ravel(), [0.1, 5.1])


def test_seed_shape_is_checked():
    with pytest.raises(ValueError):
        lloyd(LINE, np.zeros((2, 3)))
    with pytest.raises(ValueError):
        lloyd(LINE, np.zeros((5, 1)))


@pytest.mark.parametrize(
    "kwargs", [{"max_iterations": 0}, {"tolerance": -1.0}, {"empty_cluster_policy": "ignore"}]
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        KmeansConfig(**kwargs)
