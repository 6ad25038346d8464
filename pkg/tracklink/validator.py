"""Validation of feature bundles and metric files."""

from collections import Counter
from pathlib import Path
from typing import List, Union

import numpy as np

from .bundle_io import read_bundle, read_metric
from .config import FEATURE_MAGIC, METRIC_MAGIC, TOLERANCES
from .errors import FormatError, InputError
from .models import CameraGraph, Metric


class ValidationResult:
    """Result of a validation operation."""

    def __init__(self):
        self.is_valid = True
        self.errors: List[str] = []
        self.warnings: List[str] = []
        self.info: List[str] = []

    def add_error(self, message: str) -> None:
        self.errors.append(message)
        self.is_valid = False

    def add_warning(self, message: str) -> None:
        self.warnings.append(message)

    def add_info(self, message: str) -> None:
        self.info.append(message)

    def __str__(self) -> str:
        lines = ["✓ Validation passed" if self.is_valid else "✗ Validation failed"]
        for title, messages in (
            ("Errors", self.errors), ("Warnings", self.warnings), ("Info", self.info)
        ):
            if messages:
                lines.append(f"{title} ({len(messages)}):")
                lines.extend(f"  - {m}" for m in messages)
        return "\n".join(lines)


class BundleValidator:
    """Validator for tracklink binary files."""

    def validate_graph(self, graph: CameraGraph) -> ValidationResult:
        """Check a decoded camera graph for content problems.

        Args:
            graph: Camera graph to check

        Returns:
            ValidationResult with validation status and messages
        """
        result = ValidationResult()

        if not len(graph):
            result.add_error("Bundle has no tracklets")
            return result

        frames = [len(t) for t in graph]
        result.add_info(
            f"Bundle contains {len(graph)} tracklets of dimension {graph.dim} "
            f"({sum(frames)} frames, {min(frames)}-{max(frames)} per tracklet)"
        )

        single = [i for i, n in enumerate(frames) if n == 1]
        if single:
            result.add_warning(f"{len(single)} tracklet(s) have a single frame: {single[:10]}")

        ids = graph.person_ids
        unknown = sum(1 for pid in ids if pid is None)
        if unknown == len(ids):
            result.add_info("No person ids (unlabeled bundle)")
        elif unknown:
            result.add_warning(f"{unknown} of {len(ids)} tracklets have no person id")
        counts = Counter(p for p in ids if p is not None)
        repeated = sorted(pid for pid, n in counts.items() if n > 1)
        if repeated:
            result.add_info(f"{len(repeated)} person id(s) appear in several tracklets")

        reps = graph.representatives
        _, first = np.unique(reps, axis=0, return_index=True)
        if len(first) < len(reps):
            result.add_warning(
                f"{len(reps) - len(first)} tracklet(s) duplicate another tracklet's mean feature"
            )

        scale = float(np.abs(reps).max())
        if scale == 0.0:
            result.add_warning("All features are zero")
        return result

    def validate_metric(self, metric: Metric) -> ValidationResult:
        """Report on a decoded metric."""
        result = ValidationResult()
        eigenvalues = np.linalg.eigvalsh(metric.m)
        result.add_info(
            f"Metric of dimension {metric.dim}, eigenvalues in "
            f"[{eigenvalues.min():.6g}, {eigenvalues.max():.6g}]"
        )
        if eigenvalues.max() <= TOLERANCES["PSD"]:
            result.add_warning("Metric is zero; all distances vanish")
        elif eigenvalues.min() <= TOLERANCES["PSD"]:
            rank = int(np.sum(eigenvalues > TOLERANCES["PSD"]))
            result.add_info(f"Metric is rank deficient (rank {rank})")
        return result

    def validate_file(self, file_path: Union[str, Path]) -> ValidationResult:
        """Validate a feature bundle or metric file, chosen by its magic bytes.

        Args:
            file_path: Path to the file

        Returns:
            ValidationResult with validation status and messages
        """
        result = ValidationResult()

        try:
            with open(file_path, "rb") as f:
                magic = f.read(4)
        except FileNotFoundError as e:
            result.add_error(f"File not found: {e}")
            return result
        except PermissionError as e:
            result.add_error(f"Permission denied reading file: {e}")
            return result
        except OSError as e:
            result.add_error(f"Failed to read file: {e}")
            return result

        try:
            if magic == METRIC_MAGIC:
                return self.validate_metric(read_metric(file_path))
            if magic == FEATURE_MAGIC:
                return self.validate_graph(read_bundle(file_path))
        except FormatError as e:
            result.add_error(f"Invalid file structure: {e}")
            return result
        except InputError as e:
            result.add_error(f"Invalid file contents: {e}")
            return result

        result.add_error(f"Unrecognized file magic {magic!r}")
        return result
