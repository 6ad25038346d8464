"""Builders shared by several test modules."""

import numpy as np

from tracklink.models import CameraGraph, Tracklet


def make_graph(rng: np.random.Generator, count: int, dim: int, frames=(2, 5)) -> CameraGraph:
    """Random camera graph with person ids 0..count-1."""
    return CameraGraph(tuple(
        Tracklet(rng.normal(size=(int(rng.integers(frames[0], frames[1] + 1)), dim)), pid)
        for pid in range(count)
    ))
