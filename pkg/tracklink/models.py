"""Shared domain types.

All types are immutable after construction: arrays are copied on the way in
and marked read-only, so values can be shared freely between readers.
"""

from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .config import DUMMY, TOLERANCES
from .errors import DimensionMismatch, EmptyGraph, InputError, InvalidAssignment


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


def check_frame(values: np.ndarray, dim: Optional[int] = None) -> np.ndarray:
    """Validate a single frame feature vector and return it as floats.

    Raises:
        DimensionMismatch: If the vector is not 1-D or its length is not ``dim``
        InputError: If an entry is NaN or infinite
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise DimensionMismatch(f"frame feature must be a vector, got shape {values.shape}")
    if dim is not None and values.shape[0] != dim:
        raise DimensionMismatch(f"frame has dimension {values.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(values)):
        raise InputError("frame feature contains NaN or infinite entries")
    return values


@dataclass(frozen=True)
class Tracklet:
    """One person's frame-feature sequence in one camera.

    ``frames`` is an (F, d) array with F >= 1. ``person_id`` is a ground-truth
    tag used only by evaluation.
    """

    frames: np.ndarray
    person_id: Optional[int] = None

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=float)
        if frames.ndim == 1:
            frames = frames[None, :]
        if frames.ndim != 2:
            raise DimensionMismatch(f"tracklet frames must be 2-D, got shape {frames.shape}")
        if frames.shape[0] < 1:
            raise InputError("tracklet must contain at least one frame")
        if not np.all(np.isfinite(frames)):
            raise InputError("tracklet contains NaN or infinite entries")
        object.__setattr__(self, "frames", _frozen(frames))

    @classmethod
    def from_frames(
        cls, frames: Sequence[Sequence[float]], person_id: Optional[int] = None
    ) -> "Tracklet":
        """Build a tracklet from a list of frame vectors, checking each one."""
        if len(frames) == 0:
            raise InputError("tracklet must contain at least one frame")
        first = check_frame(frames[0])
        rows = [first] + [check_frame(f, first.shape[0]) for f in frames[1:]]
        return cls(np.stack(rows), person_id)

    @property
    def dim(self) -> int:
        return self.frames.shape[1]

    def __len__(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class CameraGraph:
    """Ordered tracklets of one camera with cached mean representatives."""

    tracklets: Tuple[Tracklet, ...]
    representatives: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        tracklets = tuple(self.tracklets)
        object.__setattr__(self, "tracklets", tracklets)
        if not tracklets:
            object.__setattr__(self, "representatives", _frozen(np.zeros((0, 0))))
            return
        dims = {t.dim for t in tracklets}
        if len(dims) != 1:
            raise DimensionMismatch(f"tracklets in one camera have mixed dimensions {sorted(dims)}")
        reps = np.stack([t.frames.mean(axis=0) for t in tracklets])
        object.__setattr__(self, "representatives", _frozen(reps))

    @property
    def dim(self) -> int:
        if not self.tracklets:
            raise EmptyGraph("camera graph has no tracklets")
        return self.tracklets[0].dim

    @property
    def person_ids(self) -> List[Optional[int]]:
        return [t.person_id for t in self.tracklets]

    def stacked_frames(self) -> Tuple[np.ndarray, np.ndarray]:
        """All frames stacked row-wise plus the start offset of each tracklet."""
        lengths = np.array([len(t) for t in self.tracklets])
        offsets = np.concatenate([[0], np.cumsum(lengths)[:-1]])
        return np.vstack([t.frames for t in self.tracklets]), offsets

    def __len__(self) -> int:
        return len(self.tracklets)

    def __iter__(self) -> Iterator[Tracklet]:
        return iter(self.tracklets)

    def __getitem__(self, index: int) -> Tracklet:
        return self.tracklets[index]


@dataclass(frozen=True)
class Metric:
    """Symmetric positive semidefinite matrix defining D_M."""

    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"metric must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InputError("metric contains NaN or infinite entries")
        if np.max(np.abs(m - m.T), initial=0.0) > TOLERANCES["SYMMETRY"]:
            raise InputError("metric is not symmetric")
        if m.size and np.linalg.eigvalsh(m).min() < -TOLERANCES["PSD"]:
            raise InputError("metric is not positive semidefinite")
        object.__setattr__(self, "m", _frozen(m))

    @classmethod
    def identity(cls, dim: int) -> "Metric":
        return cls(np.eye(dim))

    @property
    def dim(self) -> int:
        return self.m.shape[0]


@dataclass(frozen=True)
class CostMatrix:
    """m x n combined assignment costs with their mean c_m."""

    c: np.ndarray
    mean_cost: float = field(init=False)

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 2 or c.size == 0:
            raise InputError(f"cost matrix must be a non-empty 2-D array, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise InputError("cost matrix contains NaN or infinite entries")
        object.__setattr__(self, "c", _frozen(c))
        object.__setattr__(self, "mean_cost", float(c.mean()))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.c.shape


@dataclass(frozen=True)
class Assignment:
    """Per-row match target: a column index of camera B or DUMMY."""

    target: Tuple[int, ...]
    num_columns: int

    def __post_init__(self):
        target = tuple(int(t) for t in self.target)
        object.__setattr__(self, "target", target)
        real = [t for t in target if t != DUMMY]
        if any(t < 0 or t >= self.num_columns for t in real):
            raise InvalidAssignment(f"assignment target out of range [0, {self.num_columns})")
        if len(set(real)) != len(real):
            raise InvalidAssignment("assignment uses a real column more than once")

    @classmethod
    def all_dummy(cls, rows: int, num_columns: int) -> "Assignment":
        return cls((DUMMY,) * rows, num_columns)

    @property
    def num_dummy(self) -> int:
        return sum(1 for t in self.target if t == DUMMY)

    def matched_mask(self) -> np.ndarray:
        """Boolean m x n matrix, True at matched (i, target[i]) cells."""
        mask = np.zeros((len(self.target), self.num_columns), dtype=bool)
        for i, j in enumerate(self.target):
            if j != DUMMY:
                mask[i, j] = True
        return mask

    def pairs(self) -> List[Tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.target) if j != DUMMY]

    def __len__(self) -> int:
        return len(self.target)


@dataclass(frozen=True)
class SoftLabelMatrix:
    """Re-weighted labels l(i, j) with per-class balancing weights.

    The weights are ``None`` when their class is empty.
    """

    l: np.ndarray
    pos_weight: Optional[float]
    neg_weight: Optional[float]

    def __post_init__(self):
        object.__setattr__(self, "l", _frozen(self.l))

    @property
    def num_positive(self) -> int:
        return int(np.count_nonzero(self.l > 0))

    @property
    def num_negative(self) -> int:
        return int(np.count_nonzero(self.l == -1))

    def weights(self) -> np.ndarray:
        """Per-cell weight omega_ij (zero where l = 0)."""
        w = np.zeros_like(self.l)
        if self.pos_weight is not None:
            w[self.l > 0] = self.pos_weight
        if self.neg_weight is not None:
            w[self.l == -1] = self.neg_weight
        return w


@dataclass(frozen=True)
class GroundTruth:
    """Injective pairing of camera-A tracklets to camera-B tracklets (or none)."""

    target: Tuple[Optional[int], ...]
    num_columns: int

    def __post_init__(self):
        target = tuple(None if t is None or t == DUMMY else int(t) for t in self.target)
        object.__setattr__(self, "target", target)
        real = [t for t in target if t is not None]
        if any(t < 0 or t >= self.num_columns for t in real):
            raise InvalidAssignment(f"truth target out of range [0, {self.num_columns})")
        if len(set(real)) != len(real):
            raise InvalidAssignment("truth pairing is not injective")

    @property
    def num_pairs(self) -> int:
        return sum(1 for t in self.target if t is not None)

    def pairs(self) -> List[Tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.target) if j is not None]

    def __len__(self) -> int:
        return len(self.target)


def truth_from_person_ids(a: CameraGraph, b: CameraGraph) -> GroundTruth:
    """Pair tracklets that carry the same person id.

    When a person has several tracklets in a camera they are paired in order;
    leftovers map to none.
    """
    slots = {}
    for j, pid in enumerate(b.person_ids):
        if pid is not None:
            slots.setdefault(pid, []).append(j)
    target: List[Optional[int]] = []
    for pid in a.person_ids:
        queue = slots.get(pid) if pid is not None else None
        target.append(queue.pop(0) if queue else None)
    return GroundTruth(tuple(target), len(b))


def validate_bundle(a: CameraGraph, b: CameraGraph) -> int:
    """Check a two-camera bundle and return its shared feature dimension.

    Raises:
        EmptyGraph: If either camera has no tracklets
        DimensionMismatch: If any tracklet's dimension differs from the rest
    """
    for name, graph in (("A", a), ("B", b)):
        if len(graph) == 0:
            raise EmptyGraph(f"camera {name} has no tracklets")
    dim = a.dim
    for name, graph in (("A", a), ("B", b)):
        for index, tracklet in enumerate(graph):
            if tracklet.dim != dim:
                raise DimensionMismatch(
                    f"camera {name} tracklet {index} has dimension {tracklet.dim}, expected {dim}"
                )
        recomputed = np.stack([t.frames.mean(axis=0) for t in graph])
        if np.max(np.abs(recomputed - graph.representatives)) > TOLERANCES["REPRESENTATIVE"]:
            raise InputError(f"camera {name} representatives are stale")
    return dim
