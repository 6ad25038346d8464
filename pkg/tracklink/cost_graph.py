"""Assignment cost construction: sequence cost, kNN neighborhood cost and
their log-logistic combination C(i, j) = log(1 + exp(C_S + lambda * C_N)).
"""

import logging
from dataclasses import dataclass
from typing import FrozenSet, List, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyNeighborhood
from .models import CameraGraph, CostMatrix, Metric, Tracklet
from .utils.numerics import pairwise_mahalanobis, quadratic_forms, softplus

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NeighborSet:
    """Same-camera k nearest neighbors of one tracklet (owner excluded)."""

    owner: int
    members: FrozenSet[int]

    def __len__(self) -> int:
        return len(self.members)


def mahalanobis(metric: Metric, u: np.ndarray, v: np.ndarray) -> float:
    """Squared Mahalanobis distance (u - v)^T M (u - v), clamped at zero."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.shape != (metric.dim,):
        raise DimensionMismatch(
            f"vectors of shape {u.shape} and {v.shape} do not fit a {metric.dim}-dim metric"
        )
    diff = u - v
    return max(float(diff @ metric.m @ diff), 0.0)


def sequence_cost(metric: Metric, t_i: Tracklet, t_j: Tracklet) -> float:
    """Mean Mahalanobis distance over all |t_i| * |t_j| frame pairs."""
    if t_i.dim != t_j.dim or t_i.dim != metric.dim:
        raise DimensionMismatch("tracklets and metric do not share a dimension")
    diffs = t_i.frames[:, None, :] - t_j.frames[None, :, :]
    dist = np.einsum("pqi,ij,pqj->pq", diffs, metric.m, diffs)
    return float(np.maximum(dist, 0.0).mean())


def sequence_costs(a: CameraGraph, b: CameraGraph, metric: Metric) -> np.ndarray:
    """All-pairs sequence cost matrix.

    Uses mean_{p,q} D(x_p, y_q) = mean_p x_p'Mx_p + mean_q y_q'My_q - 2 xbar'M ybar,
    which avoids enumerating frame pairs.
    """
    m = metric.m
    frames_a, offsets_a = a.stacked_frames()
    frames_b, offsets_b = b.stacked_frames()
    lengths_a = np.array([len(t) for t in a])
    lengths_b = np.array([len(t) for t in b])
    q_a = np.add.reduceat(quadratic_forms(frames_a, m), offsets_a) / lengths_a
    q_b = np.add.reduceat(quadratic_forms(frames_b, m), offsets_b) / lengths_b
    cross = a.representatives @ m @ b.representatives.T
    return np.maximum(q_a[:, None] + q_b[None, :] - 2.0 * cross, 0.0)


def knn_neighborhoods(graph: CameraGraph, metric: Metric, k: int) -> List[NeighborSet]:
    """k nearest same-camera tracklets of every tracklet under D_M.

    Ties are broken by the lower index; with fewer than k other tracklets the
    neighbor set holds all of them.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    reps = graph.representatives
    dist = pairwise_mahalanobis(reps, reps, metric.m)
    np.fill_diagonal(dist, np.inf)
    size = min(k, len(graph) - 1)
    order = np.argsort(dist, axis=1, kind="stable")
    return [
        NeighborSet(owner=i, members=frozenset(int(j) for j in order[i, :size]))
        for i in range(len(graph))
    ]


def neighborhood_cost(
    metric: Metric,
    nbr_i: NeighborSet,
    nbr_j: NeighborSet,
    reps_a: np.ndarray,
    reps_b: np.ndarray,
) -> float:
    """Mean D_M over the cross pairs of the two neighbor sets' representatives.

    Raises:
        EmptyNeighborhood: If either neighbor set is empty
    """
    if not nbr_i.members or not nbr_j.members:
        raise EmptyNeighborhood(f"tracklet {nbr_i.owner} or {nbr_j.owner} has no neighbors")
    rows = reps_a[sorted(nbr_i.members)]
    cols = reps_b[sorted(nbr_j.members)]
    return float(pairwise_mahalanobis(rows, cols, metric.m).mean())


def _membership(neighbors: Sequence[NeighborSet], size: int) -> np.ndarray:
    """Row-normalized indicator matrix: row i averages over i's neighbors."""
    member = np.zeros((len(neighbors), size))
    for nbr in neighbors:
        member[nbr.owner, sorted(nbr.members)] = 1.0 / len(nbr)
    return member


def neighborhood_costs(
    a: CameraGraph, b: CameraGraph, metric: Metric, k: int
) -> np.ndarray:
    """All-pairs neighborhood cost; zero when either camera has one tracklet."""
    if len(a) < 2 or len(b) < 2:
        logger.debug("single-tracklet camera, neighborhood cost set to 0")
        return np.zeros((len(a), len(b)))
    cross = pairwise_mahalanobis(a.representatives, b.representatives, metric.m)
    member_a = _membership(knn_neighborhoods(a, metric, k), len(a))
    member_b = _membership(knn_neighborhoods(b, metric, k), len(b))
    return member_a @ cross @ member_b.T


def combine_costs(seq: np.ndarray, nbr: np.ndarray, lam: float) -> np.ndarray:
    """log(1 + exp(C_S + lambda * C_N)), overflow-safe."""
    return softplus(np.asarray(seq) + lam * np.asarray(nbr))


def assignment_costs(
    a: CameraGraph, b: CameraGraph, metric: Metric, lam: float, k: int
) -> CostMatrix:
    """Combined m x n assignment cost matrix under the given metric."""
    seq = sequence_costs(a, b, metric)
    nbr = neighborhood_costs(a, b, metric, k) if lam > 0 else np.zeros_like(seq)
    return CostMatrix(np.atleast_2d(combine_costs(seq, nbr, lam)))
