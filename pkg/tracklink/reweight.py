"""Label re-weighting: hard assignment + costs -> soft labels and class weights.

With c_m the mean cost, each cell (i, j) becomes
  e^{-C(i,j)}  if matched and C(i,j) < c_m  (soft positive)
  -1           if unmatched and C(i,j) < c_m  (hard negative)
  0            otherwise (filtered; C(i,j) = c_m counts as filtered)
"""

import logging
from typing import Literal

import numpy as np

from .errors import InvalidAssignment, NoNegatives, NoPositives
from .models import Assignment, CostMatrix, SoftLabelMatrix

logger = logging.getLogger(__name__)

LabelMode = Literal["soft", "hard"]


def mean_cost(costs: CostMatrix) -> float:
    """Arithmetic mean of all m * n costs (the threshold for both classes)."""
    return float(costs.c.mean())


def label_values(costs: CostMatrix, assignment: Assignment, mode: LabelMode = "soft") -> np.ndarray:
    """The m x n label matrix without class weights.

    ``hard`` mode skips re-weighting: matched cells get 1, all others -1.
    """
    if len(assignment) != costs.shape[0] or assignment.num_columns != costs.shape[1]:
        raise InvalidAssignment(f"assignment does not fit costs of shape {costs.shape}")
    matched = assignment.matched_mask()
    if mode == "hard":
        return np.where(matched, 1.0, -1.0)
    c = costs.c
    below = c < costs.mean_cost
    # e^{-C} underflows past C ~ 745; keep soft positives strictly positive
    soft = np.maximum(np.exp(-c), np.finfo(float).tiny)
    return np.where(below, np.where(matched, soft, -1.0), 0.0)


def label_matrix(labels: np.ndarray) -> SoftLabelMatrix:
    """Wrap labels with balancing weights; a weight is None if its class is empty."""
    num_pos = int(np.count_nonzero(labels > 0))
    num_neg = int(np.count_nonzero(labels == -1))
    return SoftLabelMatrix(
        l=labels,
        pos_weight=1.0 / num_pos if num_pos else None,
        neg_weight=1.0 / num_neg if num_neg else None,
    )


def reweight_labels(
    costs: CostMatrix, assignment: Assignment, mode: LabelMode = "soft"
) -> SoftLabelMatrix:
    """Soft labels with class-balancing weights 1/#positives and 1/#negatives.

    Raises:
        NoPositives: If every matched pair was filtered
        NoNegatives: If no hard negative remains
    """
    labels = label_matrix(label_values(costs, assignment, mode))
    if labels.pos_weight is None:
        raise NoPositives("no matched pair has a cost below the mean")
    if labels.neg_weight is None:
        raise NoNegatives("no unmatched pair has a cost below the mean")
    logger.debug(
        "re-weighted labels: %d positives, %d hard negatives",
        labels.num_positive, labels.num_negative,
    )
    return labels
