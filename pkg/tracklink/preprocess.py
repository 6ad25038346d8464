"""Feature-space preparation: PCA reduction, temporal max-pooling, means.

The reduction is fit once on the union of both cameras' frames and then
applied to every frame; pooling runs after the reduction.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional

import numpy as np

from .errors import DimensionMismatch, InputError, RankDeficient, TooFewSamples
from .models import CameraGraph, Tracklet, _frozen, check_frame

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PcaModel:
    """Mean vector and orthonormal basis (d_raw x d_out) of a PCA fit."""

    mean: np.ndarray
    basis: np.ndarray
    explained_variance: np.ndarray

    def __post_init__(self):
        for name in ("mean", "basis", "explained_variance"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def d_raw(self) -> int:
        return self.basis.shape[0]

    @property
    def d_out(self) -> int:
        return self.basis.shape[1]


def _normalize_signs(basis: np.ndarray) -> np.ndarray:
    """Flip each column so that its largest-magnitude entry is positive."""
    pivots = np.argmax(np.abs(basis), axis=0)
    signs = np.sign(basis[pivots, np.arange(basis.shape[1])])
    signs[signs == 0] = 1.0
    return basis * signs


def pca_fit(frames: np.ndarray, d_out: int) -> PcaModel:
    """Fit a PCA basis to an (N, d_raw) sample matrix.

    Args:
        frames: Samples, one per row
        d_out: Number of principal directions to keep

    Returns:
        PcaModel with columns ordered by descending explained variance

    Raises:
        TooFewSamples: If N < 2
        RankDeficient: If the centered data has fewer than d_out non-zero
            singular values
    """
    frames = np.asarray(frames, dtype=float)
    if frames.ndim != 2:
        raise DimensionMismatch(f"PCA input must be 2-D, got shape {frames.shape}")
    n, d_raw = frames.shape
    if n < 2:
        raise TooFewSamples(f"PCA needs at least 2 samples, got {n}")
    if d_out < 1 or d_out > min(n, d_raw):
        raise InputError(f"d_out must be within [1, {min(n, d_raw)}], got {d_out}")

    mean = frames.mean(axis=0)
    _, s, vt = np.linalg.svd(frames - mean, full_matrices=False)
    cutoff = s[0] * max(n, d_raw) * np.finfo(float).eps if s.size else 0.0
    rank = int(np.count_nonzero(s > cutoff))
    if rank < d_out:
        raise RankDeficient(f"data has rank {rank}, cannot keep {d_out} components")

    basis = _normalize_signs(vt[:d_out].T)
    logger.debug("PCA fit on %d samples: %d -> %d dims", n, d_raw, d_out)
    return PcaModel(mean=mean, basis=basis, explained_variance=s[:d_out] ** 2 / (n - 1))


def pca_fit_graphs(graphs: Iterable[CameraGraph], d_out: int) -> PcaModel:
    """Fit one PCA basis on the frames of all given cameras."""
    stacks = [graph.stacked_frames()[0] for graph in graphs if len(graph)]
    if not stacks:
        raise TooFewSamples("no frames to fit PCA on")
    return pca_fit(np.vstack(stacks), d_out)


def pca_apply(model: PcaModel, frame: np.ndarray) -> np.ndarray:
    """Project one frame: basis^T (frame - mean)."""
    frame = check_frame(frame)
    if frame.shape[0] != model.d_raw:
        raise DimensionMismatch(
            f"frame has dimension {frame.shape[0]}, model expects {model.d_raw}"
        )
    return model.basis.T @ (frame - model.mean)


def pca_apply_tracklet(model: PcaModel, tracklet: Tracklet) -> Tracklet:
    """Project every frame of a tracklet."""
    if tracklet.dim != model.d_raw:
        raise DimensionMismatch(
            f"tracklet has dimension {tracklet.dim}, model expects {model.d_raw}"
        )
    return Tracklet((tracklet.frames - model.mean) @ model.basis, tracklet.person_id)


def max_pool(tracklet: Tracklet, window: int) -> Tracklet:
    """Element-wise maxima over consecutive windows of ``window`` frames.

    A final partial window is pooled as-is, so the output has
    ceil(len / window) frames.
    """
    if window < 1:
        raise InputError(f"pooling window must be >= 1, got {window}")
    starts = np.arange(0, len(tracklet), window)
    return Tracklet(np.maximum.reduceat(tracklet.frames, starts, axis=0), tracklet.person_id)


def mean_representative(tracklet: Tracklet) -> np.ndarray:
    """Arithmetic mean over the tracklet's frames."""
    return tracklet.frames.mean(axis=0)


def preprocess_graph(
    graph: CameraGraph, model: Optional[PcaModel] = None, window: int = 1
) -> CameraGraph:
    """Apply the optional PCA projection, then pooling, to every tracklet."""
    tracklets: List[Tracklet] = []
    for tracklet in graph:
        if model is not None:
            tracklet = pca_apply_tracklet(model, tracklet)
        if window > 1:
            tracklet = max_pool(tracklet, window)
        tracklets.append(tracklet)
    return CameraGraph(tuple(tracklets))
