"""Tests for label scores, retrieval metrics and set distances."""

import numpy as np
import pytest

from tracklink import evaluation
from tracklink.config import DUMMY
from tracklink.errors import DimensionMismatch, InputError
from tracklink.evaluation import (
    assignment_from_pairs,
    cmc,
    cmc_multi,
    knn_overlap_stats,
    label_prf,
    label_prf_trace,
    mean_ap,
    reid_scores,
    relevance_from_person_ids,
    set_distance_matrix,
)
from tracklink.models import Assignment, CameraGraph, GroundTruth, Metric, Tracklet


def _recount_cmc(dist, truth_col):
    """Independent CMC: rank of the true item by counting strictly closer or tied-earlier items."""
    q, g = dist.shape
    curve = np.zeros(g)
    for row, j in zip(dist, truth_col):
        rank = sum(1 for k in range(g) if row[k] < row[j] or (row[k] == row[j] and k < j))
        curve[rank:] += 1
    return curve / q


class TestLabelPrf:
    """Test suite for label_prf."""

    def test_perfect(self):
        """Test that predicting the truth exactly scores (1, 1, 1)."""
        truth = GroundTruth((1, 0, 2), 3)
        assert label_prf(Assignment((1, 0, 2), 3), truth) == (1.0, 1.0, 1.0)

    def test_all_dummy(self):
        """Test that no predictions score (0, 0, 0)."""
        truth = GroundTruth((0, 1), 2)
        assert label_prf(Assignment.all_dummy(2, 2), truth) == (0.0, 0.0, 0.0)

    def test_three_of_four(self):
        """Test 3 correct and 1 wrong out of 4 truth pairs: (0.75, 0.75, 0.75)."""
        truth = GroundTruth((0, 1, 2, 3), 5)
        p, r, f = label_prf(Assignment((0, 1, 2, 4), 5), truth)
        assert (p, r) == (0.75, 0.75)
        assert f == pytest.approx(0.75)

    def test_dummy_rows_lower_recall_only(self):
        """Test that dummy rows cost recall but not precision."""
        truth = GroundTruth((0, 1, 2, 3), 4)
        p, r, _ = label_prf(Assignment((0, 1, DUMMY, DUMMY), 4), truth)
        assert p == 1.0
        assert r == 0.5

    def test_row_mismatch(self):
        """Test that assignment and truth must have the same rows."""
        with pytest.raises(DimensionMismatch):
            label_prf(Assignment((0,), 2), GroundTruth((0, 1), 2))

    def test_trace(self):
        """Test the per-iteration F-score trace."""
        truth = GroundTruth((0, 1), 2)
        trace = label_prf_trace([Assignment.all_dummy(2, 2), Assignment((0, 1), 2)], truth)
        assert trace == [0.0, 1.0]


class TestCmc:
    """Test suite for cmc and cmc_multi."""

    def test_correct_always_closest(self):
        """Test that a minimal correct entry gives all ones."""
        dist = np.array([[0.1, 2.0, 3.0], [5.0, 0.2, 1.0]])
        np.testing.assert_array_equal(cmc(dist, [0, 1]), [1.0, 1.0, 1.0])

    def test_third_of_five(self):
        """Test a correct entry ranked third of five: (0, 0, 1, 1, 1)."""
        dist = np.array([[0.5, 0.1, 0.3, 0.2, 3.0]])
        np.testing.assert_array_equal(cmc(dist, [2]), [0.0, 0.0, 1.0, 1.0, 1.0])

    def test_matches_recount(self):
        """Test random 10 x 20 fixtures against an independent recount."""
        for seed in range(20):
            rng = np.random.default_rng(seed)
            dist = rng.integers(0, 6, size=(10, 20)).astype(float)
            truth_col = rng.integers(0, 20, size=10)
            np.testing.assert_array_equal(cmc(dist, truth_col), _recount_cmc(dist, truth_col))

    def test_multiple_relevant(self):
        """Test that the best-ranked relevant item decides the hit rank."""
        dist = np.array([[0.3, 0.1, 0.2, 0.0]])
        np.testing.assert_array_equal(cmc_multi(dist, [{1, 2}]), [0.0, 1.0, 1.0, 1.0])

    def test_empty_relevance_rejected(self):
        """Test that a query without relevant items is rejected."""
        with pytest.raises(InputError):
            cmc_multi(np.zeros((1, 3)), [set()])


class TestMeanAp:
    """Test suite for mean_ap."""

    def test_relevant_on_top(self):
        """Test that relevant items in the top ranks give 1."""
        dist = np.array([[0.1, 0.2, 0.9], [0.8, 0.1, 0.5]])
        assert mean_ap(dist, [{0, 1}, {1}]) == 1.0

    def test_hand_computed(self):
        """Test relevant items at ranks 1 and 4: (1/1 + 2/4) / 2 = 0.75."""
        dist = np.array([[0.0, 0.1, 0.2, 0.3, 0.4]])
        assert mean_ap(dist, [{0, 3}]) == 0.75

    def test_duplicate_query(self):
        """Test that repeating every query leaves mAP unchanged."""
        rng = np.random.default_rng(4)
        dist = rng.random((3, 6))
        relevant = [{0}, {2, 5}, {1}]
        twice = mean_ap(np.vstack([dist, dist]), relevant + relevant)
        assert twice == pytest.approx(mean_ap(dist, relevant), abs=1e-15)

    def test_matches_recount(self):
        """Test mAP against a per-query recount on random fixtures."""
        rng = np.random.default_rng(8)
        dist = rng.random((10, 20))
        relevant = [set(rng.choice(20, size=3, replace=False).tolist()) for _ in range(10)]
        aps = []
        for row, wanted in zip(dist, relevant):
            order = sorted(range(20), key=lambda k: (row[k], k))
            hits, precisions = 0, []
            for rank, k in enumerate(order, start=1):
                if k in wanted:
                    hits += 1
                    precisions.append(hits / rank)
            aps.append(sum(precisions) / len(precisions))
        assert mean_ap(dist, relevant) == pytest.approx(sum(aps) / len(aps), abs=1e-15)


class TestSetDistance:
    """Test suite for set distances."""

    def setup_method(self):
        """Set up the {(0,)} vs {(1,),(3,)} fixture."""
        self.metric = Metric.identity(1)
        self.a = Tracklet(np.array([[0.0]]))
        self.b = Tracklet(np.array([[1.0], [3.0]]))

    def test_identical_single_frames(self):
        """Test zero distance in both modes."""
        t = Tracklet(np.array([[2.0]]))
        assert evaluation.test_set_distance(self.metric, t, t, "mean") == 0.0
        assert evaluation.test_set_distance(self.metric, t, t, "min_regularized") == 0.0

    def test_mean_mode(self):
        """Test the mean mode on the fixture: 5."""
        assert evaluation.test_set_distance(self.metric, self.a, self.b, "mean") == 5.0

    def test_min_without_regularizer(self):
        """Test that alpha = 0 gives the plain minimum: 1."""
        assert evaluation.test_set_distance(self.metric, self.a, self.b, "min_regularized", alpha=0.0) == 1.0

    def test_min_regularized(self):
        """Test min + alpha * mean with alpha = 0.5: 1 + 2.5."""
        assert evaluation.test_set_distance(self.metric, self.a, self.b, "min_regularized", alpha=0.5) == 3.5

    def test_unknown_mode(self):
        """Test that an unknown mode is rejected."""
        with pytest.raises(InputError):
            evaluation.test_set_distance(self.metric, self.a, self.b, "median")

    def test_matrix_modes_agree_with_pairwise(self):
        """Test the distance matrix in both modes against per-pair evaluation."""
        query = CameraGraph((self.a, self.b))
        gallery = CameraGraph((self.b, Tracklet(np.array([[4.0]]))))
        for mode in ("mean", "min_regularized"):
            expected = [[evaluation.test_set_distance(self.metric, q, g, mode) for g in gallery] for q in query]
            np.testing.assert_allclose(set_distance_matrix(self.metric, query, gallery, mode), expected)


class TestReidScores:
    """Test suite for reid_scores and relevance_from_person_ids."""

    def test_relevance(self):
        """Test that queries without a gallery match are dropped."""
        query = CameraGraph(tuple(Tracklet(np.zeros((1, 1)), pid) for pid in (4, 5, 6)))
        gallery = CameraGraph(tuple(Tracklet(np.zeros((1, 1)), pid) for pid in (6, 4, 4)))
        kept, relevant = relevance_from_person_ids(query, gallery)
        assert kept == [0, 2]
        assert relevant == [{1, 2}, {0}]

    def test_clean_split_is_perfect(self, clean_benchmark):
        """Test that identical query and gallery appearances rank first."""
        curve, m_ap = reid_scores(Metric.identity(clean_benchmark.query.dim), clean_benchmark.query, clean_benchmark.gallery)
        assert curve[0] == 1.0
        assert m_ap == 1.0

    def test_no_overlap(self):
        """Test that disjoint person ids are rejected."""
        query = CameraGraph((Tracklet(np.zeros((1, 1)), 1),))
        gallery = CameraGraph((Tracklet(np.zeros((1, 1)), 2),))
        with pytest.raises(InputError):
            reid_scores(Metric.identity(1), query, gallery)


class TestKnnOverlap:
    """Test suite for knn_overlap_stats."""

    def test_identical_geometry(self):
        """Test that identical cameras give a same-identity overlap rate of 1."""
        rng = np.random.default_rng(5)
        points = rng.normal(size=(12, 3))
        a = CameraGraph(tuple(Tracklet(p[None, :]) for p in points))
        order = rng.permutation(12)
        b = CameraGraph(tuple(Tracklet(points[i][None, :]) for i in order))
        position = {int(i): j for j, i in enumerate(order)}
        truth = GroundTruth(tuple(position[i] for i in range(12)), 12)
        same, _ = knn_overlap_stats(a, b, Metric.identity(3), 3, truth)
        assert same == 1.0

    def test_unrelated_geometry_rate(self):
        """Test the different-identity rate of unrelated cameras against k^2 / m."""
        rng = np.random.default_rng(6)
        m, k = 200, 3
        a = CameraGraph(tuple(Tracklet(p[None, :]) for p in rng.normal(size=(m, 2))))
        b = CameraGraph(tuple(Tracklet(p[None, :]) for p in rng.normal(size=(m, 2))))
        truth = GroundTruth(tuple(range(m)), m)
        samples = 2000
        _, diff = knn_overlap_stats(a, b, Metric.identity(2), k, truth, num_samples=samples, seed=1)
        expected = 1 - (1 - k / m) ** k
        sigma = np.sqrt(expected * (1 - expected) / samples)
        assert abs(diff - expected) <= 3 * sigma + 0.01

    def test_truth_rows_must_match(self):
        """Test that truth must cover camera A."""
        a = CameraGraph(tuple(Tracklet(np.array([[float(i)]])) for i in range(3)))
        with pytest.raises(DimensionMismatch):
            knn_overlap_stats(a, a, Metric.identity(1), 1, GroundTruth((0, 1), 3))


def test_assignment_from_pairs():
    """Test building an assignment from pairs with missing rows as dummy."""
    assignment = assignment_from_pairs([(0, 2), (2, 0)], rows=3, columns=3)
    assert assignment.target == (2, DUMMY, 0)
