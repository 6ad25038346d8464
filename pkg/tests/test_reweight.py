"""Tests for label re-weighting."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tracklink.config import DUMMY
from tracklink.errors import NoNegatives, NoPositives
from tracklink.matcher import solve_assignment
from tracklink.models import Assignment, CostMatrix
from tracklink.reweight import label_values, mean_cost, reweight_labels


def _costs_and_assignment():
    """Random cost matrix with its optimal assignment under a random dummy cost."""
    return st.tuples(
        arrays(np.float64, st.tuples(st.integers(2, 7), st.integers(2, 7)),
               elements=st.floats(0.0, 2000.0, allow_nan=False)),
        st.floats(0.0, 2500.0, allow_nan=False),
    )


class TestMeanCost:
    """Test suite for mean_cost."""

    def test_single_row(self):
        """Test C=[[1,3]] has mean 2."""
        assert mean_cost(CostMatrix(np.array([[1.0, 3.0]]))) == 2.0

    def test_constant(self):
        """Test that a constant matrix has that constant as mean."""
        assert mean_cost(CostMatrix(np.full((3, 4), 1.25))) == 1.25

    def test_hand_sum(self):
        """Test C=[[0.1,5],[0.3,6]] has mean 2.85."""
        assert mean_cost(CostMatrix(np.array([[0.1, 5.0], [0.3, 6.0]]))) == pytest.approx(2.85)


class TestReweightLabels:
    """Test suite for reweight_labels."""

    def setup_method(self):
        """Set up the 2 x 2 fixture: matched diagonal, c_m = 2.85."""
        self.costs = CostMatrix(np.array([[0.1, 0.3], [6.0, 5.0]]))
        self.assignment = Assignment((0, 1), 2)

    def test_fixture_labels(self):
        """Test all three branches on the 2 x 2 fixture."""
        labels = reweight_labels(self.costs, self.assignment)
        np.testing.assert_array_equal(labels.l, [[math.exp(-0.1), -1.0], [0.0, 0.0]])
        assert labels.pos_weight == 1.0
        assert labels.neg_weight == 1.0

    def test_soft_positive_value(self):
        """Test a matched pair with C=0.2 below c_m=1 gets e^-0.2."""
        costs = CostMatrix(np.array([[0.2, 1.8], [1.0, 1.0]]))
        labels = label_values(costs, Assignment((0, DUMMY), 2))
        assert labels[0, 0] == pytest.approx(0.818731, abs=1e-6)

    def test_large_costs_stay_positive(self):
        """Test that matched cells far past exp underflow still count as positives."""
        costs = CostMatrix(np.array([[800.0, 820.0], [900.0, 800.0]]))
        labels = reweight_labels(costs, Assignment((0, 1), 2))
        assert labels.num_positive == 2
        assert np.all(labels.l[[0, 1], [0, 1]] == np.finfo(float).tiny)

    def test_easy_negative_filtered(self):
        """Test an unmatched pair with C=2 above c_m=1 gets 0."""
        costs = CostMatrix(np.array([[0.0, 2.0], [1.0, 1.0]]))
        assert label_values(costs, Assignment((0, DUMMY), 2))[0, 1] == 0.0

    def test_hard_negative(self):
        """Test an unmatched pair with C=0.5 below c_m=1 gets -1."""
        costs = CostMatrix(np.array([[0.5, 1.5], [1.0, 1.0]]))
        assert label_values(costs, Assignment((1, DUMMY), 2))[0, 0] == -1.0

    def test_cost_equal_to_mean_is_filtered(self):
        """Test that a cost exactly at the mean counts as filtered."""
        costs = CostMatrix(np.array([[1.0, 1.0], [1.0, 1.0]]))
        assert np.all(label_values(costs, Assignment((0, 1), 2)) == 0.0)

    def test_no_positives(self):
        """Test that filtering every matched pair raises NoPositives."""
        with pytest.raises(NoPositives):
            reweight_labels(self.costs, Assignment((DUMMY, DUMMY), 2))

    def test_no_negatives(self):
        """Test that having no hard negative raises NoNegatives."""
        costs = CostMatrix(np.array([[0.1, 5.0], [5.0, 0.1]]))
        with pytest.raises(NoNegatives):
            reweight_labels(costs, Assignment((0, 1), 2))

    def test_hard_mode(self):
        """Test that hard mode labels matched cells 1 and every other cell -1."""
        labels = reweight_labels(self.costs, self.assignment, mode="hard")
        np.testing.assert_array_equal(labels.l, [[1.0, -1.0], [-1.0, 1.0]])
        assert labels.pos_weight == 0.5
        assert labels.neg_weight == 0.5

    @given(_costs_and_assignment())
    def test_partition_range_and_weights(self, case):
        """Test the three-way partition, the (0, 1] range and per-class weight sums."""
        c, dummy = case
        costs = CostMatrix(c)
        assignment, _ = solve_assignment(costs, dummy)
        values = label_values(costs, assignment)
        matched = assignment.matched_mask()
        below = c < costs.mean_cost

        assert np.all((values == 0) | (values == -1) | ((values > 0) & (values <= 1)))
        assert np.all(values[~below] == 0)
        assert np.all(values[below & ~matched] == -1)
        assert np.all(values[below & matched] > 0)
        assert not np.any((values > 0) & ~matched)

        if not (np.any(values > 0) and np.any(values == -1)):
            return
        labels = reweight_labels(costs, assignment)
        w = labels.weights()
        assert w[labels.l > 0].sum() == pytest.approx(1.0)
        assert w[labels.l == -1].sum() == pytest.approx(1.0)
        assert np.all(w[labels.l == 0] == 0)
