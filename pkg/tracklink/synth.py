"""Synthetic two-camera benchmarks with known correspondences.

Each person has a latent identity vector of RMS norm ``identity_scale``
embedded in a signal subspace of the feature space. A tracklet adds its own
appearance offset of RMS norm ``nuisance_scale`` in the complementary
(nuisance) subspace, then passes through its camera's linear map and bias, and
every frame gets isotropic noise. When the nuisance subspace is wider than the
signal subspace, a learned Mahalanobis metric can discount it.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import ConfigInvalid
from .models import CameraGraph, GroundTruth, Tracklet
from .schemas import SynthConfig
from .utils.random_utils import SeededRandom

logger = logging.getLogger(__name__)

# (person id, segment index) identifies one tracklet record
RecordKey = Tuple[int, int]


@dataclass(frozen=True)
class Benchmark:
    """Training cameras with truth, plus a clean held-out query/gallery split."""

    camera_a: CameraGraph
    camera_b: CameraGraph
    truth: GroundTruth
    query: CameraGraph
    gallery: CameraGraph


@dataclass(frozen=True)
class _Camera:
    transform: np.ndarray
    bias: np.ndarray


class BenchmarkGenerator:
    """Draws a benchmark deterministically from a SynthConfig."""

    def __init__(self, config: Optional[SynthConfig] = None):
        """Initialize generator.

        Args:
            config: Benchmark definition (defaults when omitted)
        """
        self.config = config or SynthConfig()
        self.rng = SeededRandom(self.config.rng_seed)

    def generate(self) -> Benchmark:
        """Generate the benchmark. Calling twice on one instance continues the stream."""
        cfg = self.config
        d, latent = cfg.feature_dim, cfg.latent_dim
        basis = self.rng.orthonormal(d, d)
        self._signal = basis[:, :latent]
        self._nuisance = basis[:, latent:]
        cameras = (self._draw_camera(), self._draw_camera())

        n = cfg.num_identities
        identities = self._draw_identities(n)
        num_distractors = int(round(cfg.distractor_frac * n))
        num_segments = int(round(cfg.segment_frac * n))
        # One split set for both cameras
        split = set(self.rng.sample(range(n), num_segments)) if num_segments else set()

        records: List[Dict[RecordKey, Tracklet]] = []
        next_id = n
        for camera in cameras:
            recs: Dict[RecordKey, Tracklet] = {}
            for pid in range(n):
                tracklet = self._draw_tracklet(identities[pid], camera, pid)
                if pid in split:
                    half = len(tracklet) // 2
                    recs[(pid, 0)] = Tracklet(tracklet.frames[:half], pid)
                    recs[(pid, 1)] = Tracklet(tracklet.frames[half:], pid)
                else:
                    recs[(pid, 0)] = tracklet
            # Distractors appear in this camera only
            for z in self._draw_identities(num_distractors):
                recs[(next_id, 0)] = self._draw_tracklet(z, camera, next_id)
                next_id += 1
            records.append(recs)

        camera_a, keys_a = self._shuffled(records[0])
        camera_b, keys_b = self._shuffled(records[1])
        index_b = {key: j for j, key in enumerate(keys_b)}
        truth = GroundTruth(tuple(index_b.get(key) for key in keys_a), len(camera_b))

        test = self._draw_identities(cfg.test_identities)
        test_ids = range(next_id, next_id + cfg.test_identities)
        query = CameraGraph(tuple(
            self._draw_tracklet(z, cameras[0], pid) for z, pid in zip(test, test_ids)
        ))
        gallery = CameraGraph(tuple(
            self._draw_tracklet(z, cameras[1], pid) for z, pid in zip(test, test_ids)
        ))

        logger.info(
            "benchmark: camera A %d tracklets, camera B %d, %d true pairs, test split %d",
            len(camera_a), len(camera_b), truth.num_pairs, cfg.test_identities,
        )
        return Benchmark(camera_a, camera_b, truth, query, gallery)

    def _draw_camera(self) -> _Camera:
        d, shift = self.config.feature_dim, self.config.camera_shift
        if shift == 0:
            return _Camera(np.eye(d), np.zeros(d))
        for _ in range(100):
            transform = np.eye(d) + shift * self.rng.normal((d, d), scale=1.0 / np.sqrt(d))
            if np.linalg.cond(transform) < 1e6:
                bias_scale = shift * self.config.identity_scale / np.sqrt(d)
                return _Camera(transform, self.rng.normal((d,), scale=bias_scale))
        raise ConfigInvalid(f"camera_shift {shift} does not yield invertible camera maps")

    def _draw_identities(self, count: int) -> np.ndarray:
        latent = self.config.latent_dim
        return self.rng.normal((count, latent), scale=self.config.identity_scale / np.sqrt(latent))

    def _draw_tracklet(self, identity: np.ndarray, camera: _Camera, pid: int) -> Tracklet:
        cfg = self.config
        clean = self._signal @ identity
        if self._nuisance.shape[1] and cfg.nuisance_scale > 0:
            width = self._nuisance.shape[1]
            offset = self.rng.normal((width,), scale=cfg.nuisance_scale / np.sqrt(width))
            clean = clean + self._nuisance @ offset
        count = self.rng.randint(cfg.min_frames, cfg.max_frames)
        frames = np.tile(camera.transform @ clean + camera.bias, (count, 1))
        if cfg.camera_noise > 0:
            frames = frames + self.rng.normal(frames.shape, scale=cfg.camera_noise)
        return Tracklet(frames, pid)

    def _shuffled(self, records: Dict[RecordKey, Tracklet]) -> Tuple[CameraGraph, List[RecordKey]]:
        keys = list(records)
        order = self.rng.permutation(len(keys))
        keys = [keys[int(i)] for i in order]
        return CameraGraph(tuple(records[key] for key in keys)), keys


def generate_benchmark(cfg: Optional[SynthConfig] = None) -> Benchmark:
    """Generate a benchmark from a fresh seeded stream."""
    return BenchmarkGenerator(cfg).generate()
