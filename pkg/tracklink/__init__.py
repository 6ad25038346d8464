"""tracklink - unsupervised cross-camera label estimation for person tracklets."""

from .driver import DgmResult, DynamicGraphMatcher, dgm_run
from .models import Assignment, CameraGraph, GroundTruth, Metric, Tracklet
from .schemas import DgmConfig, SynthConfig
from .synth import generate_benchmark

__version__ = "0.1.0"
__all__ = [
    "Assignment",
    "CameraGraph",
    "DgmConfig",
    "DgmResult",
    "DynamicGraphMatcher",
    "GroundTruth",
    "Metric",
    "SynthConfig",
    "Tracklet",
    "dgm_run",
    "generate_benchmark",
]
