"""Readers and writers for feature bundles, metrics, labels, truth and reports.

Binary formats are little-endian. A feature bundle is::

    "DGMF" | u32 version | u32 num_tracklets | u32 dim
    then per tracklet: u32 person_id | u32 num_frames | num_frames*dim f32

A metric file is ``"DGMM" | u32 version | u32 dim | dim*dim f64``.
"""

import csv
import json
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from .config import (
    DUMMY,
    FEATURE_MAGIC,
    FORMAT_VERSION,
    LABELS_HEADER,
    METRIC_MAGIC,
    TRUTH_HEADER,
    UNKNOWN_PERSON_ID,
)
from .driver import IterationRecord
from .errors import BadMagic, DimensionMismatch, FormatError, TruncatedFile, VersionUnsupported
from .models import (
    Assignment,
    CameraGraph,
    CostMatrix,
    GroundTruth,
    Metric,
    SoftLabelMatrix,
    Tracklet,
)
from .schemas import DgmConfig

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_HEADER = struct.Struct("<4sIII")
_TRACKLET_HEADER = struct.Struct("<II")
_METRIC_HEADER = struct.Struct("<4sII")


class _Reader:
    """Cursor over a byte buffer that raises TruncatedFile on short reads."""

    def __init__(self, data: bytes, path: PathLike):
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, size: int) -> bytes:
        end = self.pos + size
        if end > len(self.data):
            raise TruncatedFile(
                f"{self.path}: expected {size} bytes at offset {self.pos}, "
                f"only {len(self.data) - self.pos} left"
            )
        chunk = self.data[self.pos:end]
        self.pos = end
        return chunk

    def unpack(self, fmt: struct.Struct) -> tuple:
        return fmt.unpack(self.take(fmt.size))

    def array(self, dtype: str, count: int) -> np.ndarray:
        size = np.dtype(dtype).itemsize * count
        return np.frombuffer(self.take(size), dtype=dtype, count=count)


def _check_magic(magic: bytes, expected: bytes, version: int, path: PathLike) -> None:
    if magic != expected:
        raise BadMagic(f"{path}: expected magic {expected!r}, found {magic!r}")
    if version != FORMAT_VERSION:
        raise VersionUnsupported(f"{path}: format version {version} is not supported")


# ---------------------------------------------------------------------------
# Feature bundles
# ---------------------------------------------------------------------------

def write_bundle(graph: CameraGraph, path: PathLike) -> None:
    """Write a camera graph as a feature bundle (frames stored as f32)."""
    dim = graph.dim if len(graph) else 0
    parts = [_HEADER.pack(FEATURE_MAGIC, FORMAT_VERSION, len(graph), dim)]
    for tracklet in graph:
        pid = tracklet.person_id
        if pid is None:
            pid = UNKNOWN_PERSON_ID
        elif not 0 <= pid < UNKNOWN_PERSON_ID:
            raise FormatError(f"person id {pid} does not fit the bundle format")
        parts.append(_TRACKLET_HEADER.pack(pid, len(tracklet)))
        parts.append(np.ascontiguousarray(tracklet.frames, dtype="<f4").tobytes())
    Path(path).write_bytes(b"".join(parts))
    logger.debug("wrote %d tracklets (dim %d) to %s", len(graph), dim, path)


def read_bundle(path: PathLike) -> CameraGraph:
    """Read a feature bundle.

    Raises:
        BadMagic: If the file does not start with the bundle magic
        VersionUnsupported: If the version is not 1
        TruncatedFile: If the data ends before the header says it should
        DimensionMismatch: If the header declares dimension 0 for a non-empty bundle
    """
    reader = _Reader(Path(path).read_bytes(), path)
    magic, version, count, dim = reader.unpack(_HEADER)
    _check_magic(magic, FEATURE_MAGIC, version, path)
    if count and dim == 0:
        raise DimensionMismatch(f"{path}: {count} tracklets declared with dimension 0")

    tracklets = []
    for _ in range(count):
        pid, frames = reader.unpack(_TRACKLET_HEADER)
        data = reader.array("<f4", frames * dim).reshape(frames, dim)
        person_id: Optional[int] = None if pid == UNKNOWN_PERSON_ID else pid
        tracklets.append(Tracklet(data.astype(float), person_id))
    if reader.pos != len(reader.data):
        logger.warning("%s: %d trailing bytes ignored", path, len(reader.data) - reader.pos)
    return CameraGraph(tuple(tracklets))


# ---------------------------------------------------------------------------
# Metric files
# ---------------------------------------------------------------------------

def write_metric(metric: Metric, path: PathLike) -> None:
    """Write a metric matrix as f64."""
    header = _METRIC_HEADER.pack(METRIC_MAGIC, FORMAT_VERSION, metric.dim)
    body = np.ascontiguousarray(metric.m, dtype="<f8").tobytes()
    Path(path).write_bytes(header + body)


def read_metric(path: PathLike) -> Metric:
    """Read a metric file written by write_metric."""
    reader = _Reader(Path(path).read_bytes(), path)
    magic, version, dim = reader.unpack(_METRIC_HEADER)
    _check_magic(magic, METRIC_MAGIC, version, path)
    m = reader.array("<f8", dim * dim).reshape(dim, dim).astype(float)
    return Metric(m)


# ---------------------------------------------------------------------------
# Labels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LabelRecord:
    """One row of a labels file. ``j`` is DUMMY for a dummy assignment."""

    i: int
    j: int
    y: int
    cost: float
    soft_label: float


def label_records(
    costs: CostMatrix,
    assignment: Assignment,
    labels: SoftLabelMatrix,
    dummy_cost: float,
) -> List[LabelRecord]:
    """One record per cell, plus a dummy record for every dummy-assigned row."""
    if costs.shape != labels.l.shape or costs.shape != (len(assignment), assignment.num_columns):
        raise DimensionMismatch(
            f"costs {costs.shape}, labels {labels.l.shape} and assignment "
            f"{(len(assignment), assignment.num_columns)} disagree"
        )
    records = []
    rows, cols = costs.shape
    for i in range(rows):
        target = assignment.target[i]
        for j in range(cols):
            records.append(LabelRecord(
                i, j, int(target == j), float(costs.c[i, j]), float(labels.l[i, j])
            ))
        if target == DUMMY:
            records.append(LabelRecord(i, DUMMY, 1, float(dummy_cost), 0.0))
    return records


def write_labels(
    path: PathLike,
    costs: CostMatrix,
    assignment: Assignment,
    labels: SoftLabelMatrix,
    dummy_cost: float,
) -> None:
    """Write the labels CSV (``i,j,y,cost,soft_label``; floats as shortest repr)."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(LABELS_HEADER)
        for r in label_records(costs, assignment, labels, dummy_cost):
            writer.writerow([r.i, r.j, r.y, repr(r.cost), repr(r.soft_label)])


def read_labels(path: PathLike) -> List[LabelRecord]:
    """Read a labels CSV."""
    records = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != LABELS_HEADER:
            raise FormatError(f"{path}: expected header {','.join(LABELS_HEADER)}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(LABELS_HEADER):
                raise FormatError(f"{path}:{lineno}: expected 5 fields, got {len(row)}")
            try:
                records.append(LabelRecord(
                    int(row[0]), int(row[1]), int(row[2]), float(row[3]), float(row[4])
                ))
            except ValueError as e:
                raise FormatError(f"{path}:{lineno}: {e}")
    return records


def assignment_from_labels(records: Sequence[LabelRecord]) -> Assignment:
    """Recover the hard assignment from label records (cells with y = 1)."""
    if not records:
        raise FormatError("labels file has no rows")
    rows = max(r.i for r in records) + 1
    columns = max((r.j for r in records if r.j != DUMMY), default=-1) + 1
    target = [DUMMY] * rows
    for r in records:
        if r.y == 1 and r.j != DUMMY:
            target[r.i] = r.j
    return Assignment(tuple(target), columns)


# ---------------------------------------------------------------------------
# Ground truth
# ---------------------------------------------------------------------------

def write_truth(truth: GroundTruth, path: PathLike) -> None:
    """Write truth as CSV ``i,j`` with j = -1 for rows that have no partner."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRUTH_HEADER)
        for i, j in enumerate(truth.target):
            writer.writerow([i, DUMMY if j is None else j])


def read_truth(path: PathLike, num_columns: Optional[int] = None) -> GroundTruth:
    """Read a truth CSV.

    Args:
        path: File written by write_truth
        num_columns: Size of camera B; inferred from the largest partner when omitted
    """
    target: List[Optional[int]] = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != TRUTH_HEADER:
            raise FormatError(f"{path}: expected header {','.join(TRUTH_HEADER)}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                i, j = int(row[0]), int(row[1])
            except (ValueError, IndexError):
                raise FormatError(f"{path}:{lineno}: malformed truth row {row}")
            if i != len(target):
                raise FormatError(f"{path}:{lineno}: rows must be listed in order, got i={i}")
            target.append(None if j == DUMMY else j)
    if num_columns is None:
        num_columns = max((j for j in target if j is not None), default=-1) + 1
    return GroundTruth(tuple(target), num_columns)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def _plain(value: Any) -> Any:
    """Convert numpy scalars and arrays to JSON-native values."""
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def eval_scores(
    precision: float,
    recall: float,
    f_score: float,
    cmc: Iterable[float] = (),
    mean_ap: Optional[float] = None,
) -> Dict[str, Any]:
    """The ``eval`` section of a report."""
    return {
        "precision": float(precision),
        "recall": float(recall),
        "f_score": float(f_score),
        "cmc": [float(v) for v in cmc],
        "map": None if mean_ap is None else float(mean_ap),
    }


def write_report(
    path: PathLike,
    config: Optional[DgmConfig] = None,
    history: Sequence[IterationRecord] = (),
    scores: Optional[Dict[str, Any]] = None,
    extra: Optional[Dict[str, Any]] = None,
) -> None:
    """Write a JSON report with config echo, iteration history and eval scores.

    Output is deterministic for identical inputs.
    """
    report: Dict[str, Any] = {
        "config": config.model_dump(by_alias=True, mode="json") if config else None,
        "history": [record.to_dict() for record in history],
        "eval": scores,
    }
    if extra:
        report.update(extra)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_plain(report), f, indent=2)
        f.write("\n")


def read_report(path: PathLike) -> Dict[str, Any]:
    """Load a JSON report."""
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def merge_report_eval(path: PathLike, updates: Dict[str, Any]) -> Dict[str, Any]:
    """Update the ``eval`` section of a report in place, creating the file if needed.

    Keys not in ``updates`` keep their previous values, so label scores from
    ``dgm eval`` and retrieval scores from ``dgm reid`` can share one report.
    """
    path = Path(path)
    report: Dict[str, Any] = {"config": None, "history": [], "eval": None}
    if path.exists():
        report = read_report(path)
    merged = dict(report.get("eval") or eval_scores(0.0, 0.0, 0.0))
    merged.update(_plain(updates))
    report["eval"] = merged
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2)
        f.write("\n")
    return merged
