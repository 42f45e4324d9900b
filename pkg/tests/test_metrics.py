import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from amsos.data import Dataset, Partition
from amsos.errors import DegeneratePartitionError, DimensionError
from amsos.metrics import (
    ContingencyTable,
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

CROSSED = ([0, 0, 1, 1], [0, 1, 0, 1])
TWO_BARS = np.array([[0.0, 0], [0, 2], [10, 0], [10, 2]])


class TestExternal:
    def test_identical(self):
        labels = [2, 2, 0, 1, 1]
        assert rand_index(labels, labels) == 1.0
        assert adjusted_rand(labels, labels) == 1.0
        assert hubert_index(labels, labels) == 1.0
        assert error_rate(labels, labels) == 0.0

    def test_crossed_example(self):
        assert rand_index(*CROSSED) == pytest.approx(1 / 3, abs=1e-12)
        assert adjusted_rand(*CROSSED) == pytest.approx(-0.5, abs=1e-12)
        assert hubert_index(*CROSSED) == pytest.approx(-1 / 3, abs=1e-12)

    def test_error_rate_example(self):
        assert error_rate([0, 0, 0, 1], [0, 0, 1, 1]) == 25.0

    def test_error_rate_surplus_clusters(self):
        # three clusters, two classes: the third cluster maps to nothing
        assert error_rate([0, 0, 1, 1, 2, 2], [0, 0, 1, 1, 1, 1]) == pytest.approx(100 / 3)

    def test_both_single_cluster(self):
        assert adjusted_rand([0, 0, 0], [5, 5, 5]) == 1.0

    def test_all_singletons_against_one_cluster(self):
        assert adjusted_rand([0, 1, 2, 3], [0, 0, 0, 0]) == 0.0

    def test_string_labels(self):
        assert rand_index(["a", "a", "b"], ["x", "x", "y"]) == 1.0

    def test_partition_argument(self):
        p = Partition.from_assignments(TWO_BARS, [0, 0, 1, 1])
        assert rand_index(p, [1, 1, 0, 0]) == 1.0

    def test_length_mismatch(self):
        for fn in (rand_index, adjusted_rand, hubert_index, error_rate):
            with pytest.raises(DimensionError):
                fn([0, 1], [0, 1, 1])

    def test_contingency_pair_counts(self):
        table = ContingencyTable.from_labels(*CROSSED)
        np.testing.assert_array_equal(table.counts, [[1, 1], [1, 1]])
        assert table.pair_counts == (0, 2, 2, 2)

    def test_large_m_counts_stay_exact(self):
        m = 200_000
        labels = np.arange(m) % 2
        assert ContingencyTable.from_labels(labels, labels).pair_counts[0] == 2 * (m // 2) * (m // 2 - 1) // 2


labelings = st.integers(2, 12).flatmap(
    lambda m: st.tuples(st.lists(st.integers(0, 3), min_size=m, max_size=m), st.lists(st.integers(0, 3), min_size=m, max_size=m))
)


@given(labelings)
def test_external_indices_match_oracle(pair):
    pred, truth = pair
    assert rand_index(pred, truth) == pytest.approx(oracles.rand(pred, truth), abs=1e-12)
    assert hubert_index(pred, truth) == pytest.approx(oracles.hubert(pred, truth), abs=1e-12)
    assert adjusted_rand(pred, truth) == pytest.approx(oracles.ari(pred, truth), abs=1e-12)
    assert error_rate(pred, truth) == pytest.approx(oracles.error_rate(pred, truth), abs=1e-12)


@given(labelings, st.permutations(range(4)))
def test_external_indices_ignore_label_names(pair, perm):
    pred, truth = pair
    renamed = [perm[p] for p in pred]
    for fn in (rand_index, adjusted_rand, hubert_index, error_rate):
        assert fn(renamed, truth) == pytest.approx(fn(pred, truth), abs=1e-12)


@given(labelings)
def test_symmetric_indices(pair):
    pred, truth = pair
    assert rand_index(pred, truth) == rand_index(truth, pred)
    assert adjusted_rand(pred, truth) == pytest.approx(adjusted_rand(truth, pred), abs=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_error_rate_bound_for_balanced_classes(seed):
    # with c balanced classes the majority-mapped error never exceeds 100 (c - 1) / c
    rng = np.random.default_rng(seed)
    c = int(rng.integers(2, 5))
    truth = np.repeat(np.arange(c), 6)
    pred = rng.integers(0, c, truth.size)
    assert error_rate(pred, truth) <= 100 * (c - 1) / c + 1e-12


class TestInternal:
    def test_silhouette_tight_blobs(self):
        pts = np.array([[0, 0], [0, 0.1], [10, 10], [10, 10.1]])
        assert silhouette(pts, [0, 0, 1, 1]) > 0.98

    def test_singletons(self):
        pts = np.array([[0.0, 0], [3, 4]])
        assert silhouette(pts, [0, 1]) == 0.0
        assert davies_bouldin(pts, [0, 1]) == 0.0
        assert cs_measure(pts, [0, 1]) == 0.0

    def test_two_bars(self):
        assert davies_bouldin(TWO_BARS, [0, 0, 1, 1]) == pytest.approx(0.2)
        assert cs_measure(TWO_BARS, [0, 0, 1, 1]) == pytest.approx(0.2)

    def test_single_cluster_rejected(self):
        for fn in (silhouette, davies_bouldin, cs_measure):
            with pytest.raises(DegeneratePartitionError):
                fn(TWO_BARS, [0, 0, 0, 0])

    def test_coincident_centroids_rejected(self):
        pts = np.array([[-1.0], [1.0], [0.0], [0.0]])
        for fn in (davies_bouldin, cs_measure):
            with pytest.raises(DegeneratePartitionError):
                fn(pts, [0, 0, 1, 1])

    def test_dataset_argument(self):
        d = Dataset(TWO_BARS)
        assert davies_bouldin(d, [0, 0, 1, 1]) == pytest.approx(0.2)


def random_geometry(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(4, 14))
    k = int(rng.integers(2, min(4, m) + 1))
    pts = rng.normal(size=(m, int(rng.integers(1, 4))))
    labels = np.concatenate([np.arange(k), rng.integers(0, k, m - k)])
    rng.shuffle(labels)
    return pts, labels


@given(st.integers(0, 2**32 - 1))
def test_internal_indices_match_oracle(seed):
    pts, labels = random_geometry(seed)
    lab = labels.tolist()
    s = silhouette(pts, labels)
    assert -1 <= s <= 1
    assert s == pytest.approx(oracles.silhouette(pts, lab), abs=1e-12)
    assert davies_bouldin(pts, labels) == pytest.approx(oracles.davies_bouldin(pts, lab), rel=1e-12)
    assert cs_measure(pts, labels) == pytest.approx(oracles.cs_measure(pts, lab), rel=1e-12)


def test_true_grouping_scores_better_than_random(two_blobs):
    truth = two_blobs.labels
    good = (silhouette(two_blobs, truth), davies_bouldin(two_blobs, truth), cs_measure(two_blobs, truth))
    rng = np.random.default_rng(3)
    for _ in range(100):
        rand = rng.permutation(truth)
        assert silhouette(two_blobs, rand) < good[0]
        assert davies_bouldin(two_blobs, rand) > good[1]
        assert cs_measure(two_blobs, rand) > good[2]


def test_full_report_perfect(two_blobs):
    r = full_report(two_blobs, two_blobs.labels, two_blobs.labels)
    assert (r.ari, r.ri, r.hi, r.error_rate_percent, r.k) == (1.0, 1.0, 1.0, 0.0, 2)
    assert r.silhouette > 0.9


def test_full_report_agrees_with_single_metrics(random_dataset):
    d = random_dataset(12)
    pred = np.arange(d.m) % 4
    r = full_report(d, pred, d.labels)
    assert r.ri == rand_index(pred, d.labels)
    assert r.hi == pytest.approx(2 * r.ri - 1, abs=1e-12)
    assert r.ari == pytest.approx(adjusted_rand(pred, d.labels))
    assert r.error_rate_percent == error_rate(pred, d.labels)
    assert r.silhouette == pytest.approx(silhouette(d, pred))
    assert r.db == pytest.approx(davies_bouldin(d, pred))
    assert r.cs == pytest.approx(cs_measure(d, pred))


def test_report_round_trip(two_blobs):
    r = full_report(two_blobs, two_blobs.labels, two_blobs.labels)
    assert MetricReport.from_dict(r.to_dict()) == r
    assert r.to_csv_row().count(",") == 6


def test_matches_sklearn_when_available(random_dataset):
    sk = pytest.importorskip("sklearn.metrics")
    d = random_dataset(21, m=60)
    pred = (np.arange(60) * 7) % 5
    assert adjusted_rand(pred, d.labels) == pytest.approx(sk.adjusted_rand_score(d.labels, pred), abs=1e-12)
    assert silhouette(d, pred) == pytest.approx(sk.silhouette_score(d.points, pred), abs=1e-12)
    assert davies_bouldin(d, pred) == pytest.approx(sk.davies_bouldin_score(d.points, pred), abs=1e-12)
