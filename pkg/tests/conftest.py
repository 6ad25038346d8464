"""Shared fixtures and hypothesis profiles."""

import os

import hypothesis
import numpy as np
import pytest

from tracklink.schemas import SynthConfig
from tracklink.synth import generate_benchmark

from .helpers import make_graph

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=300, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_cameras(rng):
    """Two small random cameras of dimension 4."""
    return make_graph(rng, 6, 4), make_graph(rng, 5, 4)


@pytest.fixture(scope="session")
def clean_benchmark():
    """Zero-noise benchmark: each identity looks the same in both cameras."""
    return generate_benchmark(SynthConfig(
        num_identities=12, latent_dim=6, feature_dim=6, min_frames=2, max_frames=4,
        camera_noise=0.0, nuisance_scale=0.0, camera_shift=0.0, test_identities=8,
        rng_seed=0,
    ))


@pytest.fixture(scope="session")
def small_benchmark():
    """Noisy benchmark small enough for quick end-to-end runs."""
    return generate_benchmark(SynthConfig(
        num_identities=16, latent_dim=6, feature_dim=10, min_frames=3, max_frames=5,
        test_identities=10, rng_seed=3,
    ))
