"""Scoring: label estimation quality, retrieval metrics, set distances and the
cross-camera neighborhood overlap statistic.
"""

import logging
from typing import Dict, List, Literal, Optional, Sequence, Set, Tuple

import numpy as np

from .config import DUMMY, EVAL_DEFAULTS
from .cost_graph import knn_neighborhoods, sequence_cost, sequence_costs
from .errors import DimensionMismatch, InputError
from .models import Assignment, CameraGraph, GroundTruth, Metric, Tracklet
from .utils.numerics import pairwise_mahalanobis
from .utils.random_utils import SeededRandom

logger = logging.getLogger(__name__)

SetDistanceMode = Literal["mean", "min_regularized"]


# ---------------------------------------------------------------------------
# Label estimation
# ---------------------------------------------------------------------------

def label_prf(assignment: Assignment, truth: GroundTruth) -> Tuple[float, float, float]:
    """Precision, recall and F-score of the non-dummy matches.

    Degenerate ratios (no predictions, no truth pairs) are reported as 0.
    """
    if len(assignment) != len(truth):
        raise DimensionMismatch(
            f"assignment has {len(assignment)} rows, truth has {len(truth)}"
        )
    predicted = assignment.pairs()
    correct = sum(1 for i, j in predicted if truth.target[i] == j)
    precision = correct / len(predicted) if predicted else 0.0
    recall = correct / truth.num_pairs if truth.num_pairs else 0.0
    if precision + recall == 0:
        return precision, recall, 0.0
    return precision, recall, 2 * precision * recall / (precision + recall)


def label_prf_trace(assignments: Sequence[Assignment], truth: GroundTruth) -> List[float]:
    """F-score of every iteration's assignment."""
    return [label_prf(a, truth)[2] for a in assignments]


# ---------------------------------------------------------------------------
# Retrieval
# ---------------------------------------------------------------------------

def _ranking(row: np.ndarray) -> np.ndarray:
    """Gallery indices by ascending distance, ties by index."""
    return np.argsort(row, kind="stable")


def cmc_multi(dist: np.ndarray, relevant: Sequence[Set[int]]) -> np.ndarray:
    """CMC where a query succeeds at rank r if any relevant item ranks within r."""
    dist = np.asarray(dist, dtype=float)
    q, g = dist.shape
    if len(relevant) != q:
        raise DimensionMismatch(f"{len(relevant)} relevance sets for {q} queries")
    hits = np.zeros(g)
    for row, wanted in zip(dist, relevant):
        if not wanted:
            raise InputError("every query needs at least one relevant gallery item")
        order = _ranking(row)
        first = int(np.flatnonzero(np.isin(order, list(wanted)))[0])
        hits[first] += 1
    return np.cumsum(hits) / q


def cmc(dist: np.ndarray, truth_col: Sequence[int]) -> np.ndarray:
    """Cumulative matching characteristic; entry r is the rank-(r+1) rate."""
    return cmc_multi(dist, [{int(j)} for j in truth_col])


def mean_ap(dist: np.ndarray, relevant: Sequence[Set[int]]) -> float:
    """Mean over queries of average precision at each relevant hit."""
    dist = np.asarray(dist, dtype=float)
    if len(relevant) != dist.shape[0]:
        raise DimensionMismatch(f"{len(relevant)} relevance sets for {dist.shape[0]} queries")
    aps = []
    for row, wanted in zip(dist, relevant):
        if not wanted:
            raise InputError("every query needs at least one relevant gallery item")
        hit = np.isin(_ranking(row), list(wanted))
        ranks = np.flatnonzero(hit) + 1
        aps.append(float(np.mean(np.arange(1, len(ranks) + 1) / ranks)))
    return float(np.mean(aps))


# ---------------------------------------------------------------------------
# Set distances
# ---------------------------------------------------------------------------

def test_set_distance(
    metric: Metric,
    set_a: Tracklet,
    set_b: Tracklet,
    mode: SetDistanceMode = "mean",
    alpha: float = EVAL_DEFAULTS["MIN_REGULARIZED_ALPHA"],
) -> float:
    """Distance between two frame sets.

    ``mean`` is the average pairwise distance; ``min_regularized`` is the
    minimum pairwise distance plus ``alpha`` times the average.
    """
    if mode == "mean":
        return sequence_cost(metric, set_a, set_b)
    if mode != "min_regularized":
        raise InputError(f"unknown set distance mode '{mode}'")
    dist = pairwise_mahalanobis(set_a.frames, set_b.frames, metric.m)
    return float(dist.min() + alpha * dist.mean())


# Not a pytest test despite the name
test_set_distance.__test__ = False


def set_distance_matrix(
    metric: Metric,
    query: CameraGraph,
    gallery: CameraGraph,
    mode: SetDistanceMode = "mean",
    alpha: float = EVAL_DEFAULTS["MIN_REGULARIZED_ALPHA"],
) -> np.ndarray:
    """Query x gallery set distances."""
    if mode == "mean":
        return sequence_costs(query, gallery, metric)
    return np.array([
        [test_set_distance(metric, q, g, mode, alpha) for g in gallery]
        for q in query
    ])


def relevance_from_person_ids(
    query: CameraGraph, gallery: CameraGraph
) -> Tuple[List[int], List[Set[int]]]:
    """Queries whose person appears in the gallery, with their relevant items."""
    by_id: Dict[int, Set[int]] = {}
    for j, pid in enumerate(gallery.person_ids):
        if pid is not None:
            by_id.setdefault(pid, set()).add(j)
    kept, relevant = [], []
    for i, pid in enumerate(query.person_ids):
        if pid is not None and pid in by_id:
            kept.append(i)
            relevant.append(by_id[pid])
    return kept, relevant


def reid_scores(
    metric: Metric,
    query: CameraGraph,
    gallery: CameraGraph,
    mode: SetDistanceMode = "mean",
    alpha: float = EVAL_DEFAULTS["MIN_REGULARIZED_ALPHA"],
) -> Tuple[np.ndarray, float]:
    """CMC curve and mAP of the metric on a tagged query/gallery split."""
    if query.dim != metric.dim or gallery.dim != metric.dim:
        raise DimensionMismatch(
            f"metric has dimension {metric.dim}, query {query.dim}, gallery {gallery.dim}"
        )
    kept, relevant = relevance_from_person_ids(query, gallery)
    if not kept:
        raise InputError("no query person appears in the gallery")
    dist = set_distance_matrix(metric, query, gallery, mode, alpha)[kept]
    return cmc_multi(dist, relevant), mean_ap(dist, relevant)


def rank1_trace(
    metrics: Sequence[Metric], query: CameraGraph, gallery: CameraGraph,
    mode: SetDistanceMode = "mean",
) -> List[float]:
    """Rank-1 rate of every iteration's metric."""
    return [float(reid_scores(m, query, gallery, mode)[0][0]) for m in metrics]


# ---------------------------------------------------------------------------
# Neighborhood overlap
# ---------------------------------------------------------------------------

def knn_overlap_stats(
    a: CameraGraph,
    b: CameraGraph,
    metric: Metric,
    k: int,
    truth: GroundTruth,
    num_samples: Optional[int] = None,
    seed: Optional[int] = 0,
) -> Tuple[float, float]:
    """How often two tracklets' same-camera kNN sets share a person.

    Camera-A neighbors are mapped into camera B through the truth pairing. The
    first rate covers truly matched pairs; the second covers randomly sampled
    unmatched pairs (``num_samples`` of them, default one per matched pair).
    """
    if len(truth) != len(a):
        raise DimensionMismatch(f"truth has {len(truth)} rows, camera A has {len(a)}")
    nbr_a = knn_neighborhoods(a, metric, k)
    nbr_b = knn_neighborhoods(b, metric, k)

    def overlaps(i: int, j: int) -> bool:
        mapped = {truth.target[p] for p in nbr_a[i].members} - {None}
        return bool(mapped & nbr_b[j].members)

    matched = truth.pairs()
    same = float(np.mean([overlaps(i, j) for i, j in matched])) if matched else 0.0

    rng = SeededRandom(seed)
    rows = [i for i, _ in matched] or list(range(len(a)))
    total = num_samples if num_samples is not None else max(len(matched), 1)
    diff_hits = []
    attempts = 0
    while len(diff_hits) < total and attempts < 100 * total:
        attempts += 1
        i = rows[rng.randint(0, len(rows) - 1)]
        j = rng.randint(0, len(b) - 1)
        if truth.target[i] == j:
            continue
        diff_hits.append(overlaps(i, j))
    diff = float(np.mean(diff_hits)) if diff_hits else 0.0
    logger.debug("kNN overlap: same=%.3f diff=%.3f (k=%d)", same, diff, k)
    return same, diff


def assignment_from_pairs(pairs: Sequence[Tuple[int, int]], rows: int, columns: int) -> Assignment:
    """Build an Assignment from (i, j) pairs; j = DUMMY or missing rows are dummy."""
    target = [DUMMY] * rows
    for i, j in pairs:
        target[i] = j
    return Assignment(tuple(target), columns)
