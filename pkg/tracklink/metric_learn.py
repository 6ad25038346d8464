"""Weighted log-logistic Mahalanobis metric learning.

The loss over training pairs is

    F(M) = sum_p w_p * log(1 + exp(l_p * (d_p' M d_p - c0)))

and is minimized over the PSD cone by accelerated proximal gradient: Nesterov
extrapolation, a projected gradient step with backtracking on the step size,
and a momentum restart whenever an iterate would increase the loss.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy import linalg
from scipy.special import expit

from .config import DGM_DEFAULTS, TOLERANCES
from .errors import EigenFailure, InputError
from .models import CameraGraph, Metric, SoftLabelMatrix, _frozen
from .utils.numerics import pairwise_mahalanobis, quadratic_forms, softplus, symmetrize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainingPairs:
    """Difference vectors with labels and weights for cells where l != 0."""

    diffs: np.ndarray
    labels: np.ndarray
    weights: np.ndarray
    c0: float

    def __post_init__(self):
        if self.c0 <= 0:
            raise InputError(f"c0 must be positive, got {self.c0}")
        if np.any(np.asarray(self.labels) == 0):
            raise InputError("training pairs must not carry zero labels")
        for name in ("diffs", "labels", "weights"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    def __len__(self) -> int:
        return self.labels.shape[0]


def camera_bias_c0(a: CameraGraph, b: CameraGraph, metric: Metric) -> float:
    """Mean D_M between all cross-camera representative pairs, floored at 1e-6."""
    dist = pairwise_mahalanobis(a.representatives, b.representatives, metric.m)
    return max(float(dist.mean()), TOLERANCES["C0_FLOOR"])


def rescale_metric(
    a: CameraGraph, b: CameraGraph, metric: Metric, target_c0: float
) -> Metric:
    """Scale M so the mean cross-camera representative distance equals ``target_c0``.

    A metric under which every cross-camera distance vanishes is returned unchanged.
    """
    current = float(pairwise_mahalanobis(a.representatives, b.representatives, metric.m).mean())
    if current <= TOLERANCES["C0_FLOOR"]:
        return metric
    return Metric(metric.m * (target_c0 / current))


def build_training_pairs(
    a: CameraGraph, b: CameraGraph, labels: SoftLabelMatrix, c0: float
) -> TrainingPairs:
    """Collect representative differences for every labeled cell."""
    rows, cols = np.nonzero(labels.l)
    return TrainingPairs(
        diffs=a.representatives[rows] - b.representatives[cols],
        labels=labels.l[rows, cols],
        weights=labels.weights()[rows, cols],
        c0=c0,
    )


def _margins(m: np.ndarray, pairs: TrainingPairs) -> np.ndarray:
    return pairs.labels * (quadratic_forms(pairs.diffs, m) - pairs.c0)


def pair_loss(metric: Metric, diff: np.ndarray, l: float, c0: float) -> float:
    """log(1 + exp(l * (diff' M diff - c0)))."""
    if l == 0:
        raise InputError("pair loss is undefined for a zero label")
    diff = np.asarray(diff, dtype=float)
    return softplus(l * (float(diff @ metric.m @ diff) - c0))


def _loss(m: np.ndarray, pairs: TrainingPairs) -> float:
    return float(pairs.weights @ softplus(_margins(m, pairs)))


def _gradient(m: np.ndarray, pairs: TrainingPairs) -> np.ndarray:
    coef = pairs.weights * pairs.labels * expit(_margins(m, pairs))
    return symmetrize((pairs.diffs * coef[:, None]).T @ pairs.diffs)


def total_loss(metric: Metric, pairs: TrainingPairs) -> float:
    """Weighted sum of pair losses."""
    if len(pairs) == 0:
        raise InputError("no training pairs")
    return _loss(metric.m, pairs)


def loss_gradient(metric: Metric, pairs: TrainingPairs) -> np.ndarray:
    """Gradient sum_p w_p l_p sigma(l_p (D_p - c0)) d_p d_p' (symmetric)."""
    if len(pairs) == 0:
        raise InputError("no training pairs")
    return _gradient(metric.m, pairs)


def _project(a: np.ndarray) -> np.ndarray:
    a = symmetrize(np.asarray(a, dtype=float))
    if not np.all(np.isfinite(a)):
        raise EigenFailure("cannot project a matrix with non-finite entries")
    try:
        w, v = linalg.eigh(a)
    except linalg.LinAlgError as exc:
        raise EigenFailure(f"eigendecomposition failed: {exc}")
    return symmetrize((v * np.maximum(w, 0.0)) @ v.T)


def psd_project(m: np.ndarray) -> Metric:
    """Frobenius-nearest PSD matrix: clamp negative eigenvalues to zero."""
    return Metric(_project(m))


def apg_optimize(
    pairs: TrainingPairs,
    m0: Metric,
    max_steps: int = DGM_DEFAULTS["APG_MAX_STEPS"],
    tol: float = DGM_DEFAULTS["APG_TOL"],
) -> Tuple[Metric, List[float]]:
    """Minimize the weighted loss over the PSD cone starting from ``m0``.

    Returns:
        Tuple of (learned metric, loss after every accepted step). The first
        entry of the history is F(m0) and the history never increases.
    """
    x = np.array(m0.m)
    f_x = _loss(x, pairs)
    history = [f_x]
    if f_x <= TOLERANCES["LOSS_FLOOR"]:
        return m0, history

    g0 = _gradient(x, pairs)
    g_norm = float(np.linalg.norm(g0))
    if g_norm == 0.0:
        return m0, history
    # Scale-free first step: a linear model of F would reach zero.
    step = f_x / g_norm ** 2

    x_prev = x
    t_prev, t = 1.0, 1.0
    for it in range(max_steps):
        beta = (t_prev - 1.0) / t
        y = x + beta * (x - x_prev)
        f_y = _loss(y, pairs)
        g_y = _gradient(y, pairs)

        while True:
            z = _project(y - step * g_y)
            delta = z - y
            f_z = _loss(z, pairs)
            bound = f_y + float(np.sum(g_y * delta)) + float(np.sum(delta * delta)) / (2.0 * step)
            if f_z <= bound:
                break
            step *= 0.5
            logger.debug("step %d: backtracking, step size %.3e", it, step)
            if step < TOLERANCES["MIN_STEP"]:
                z, f_z = x, f_x
                break

        if f_z > f_x:
            if beta == 0.0:
                break
            logger.debug("step %d: loss increased, restarting momentum", it)
            x_prev = x
            t_prev, t = 1.0, 1.0
            continue

        decrease = f_x - f_z
        x_prev, x, f_x = x, z, f_z
        history.append(f_x)
        t_prev, t = t, 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        if decrease <= tol * abs(history[-2]) or f_x <= TOLERANCES["LOSS_FLOOR"]:
            break

    return Metric(x), history
