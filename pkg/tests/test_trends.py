"""Full-pipeline trends on the desk-scale benchmarks.

These runs take a while; deselect them with ``-m "not slow"``.
"""

import numpy as np
import pytest

from tracklink.driver import dgm_run
from tracklink.evaluation import knn_overlap_stats, label_prf, label_prf_trace, reid_scores
from tracklink.models import Metric
from tracklink.preset_loader import PresetLoader
from tracklink.schemas import DgmConfig
from tracklink.synth import generate_benchmark

SEEDS = (7, 8, 9, 10, 11)

pytestmark = pytest.mark.slow


def _benchmark(preset: str, seed: int):
    synth = PresetLoader().load(preset).synth
    return generate_benchmark(synth.model_copy(update={"rng_seed": seed}))


def test_metric_updates_improve_labels():
    """Test the seed-averaged F-score gain over iteration 0 and over the static baseline."""
    start, final, static = [], [], []
    for seed in SEEDS:
        bench = _benchmark("default", seed)
        result = dgm_run(bench.camera_a, bench.camera_b, DgmConfig(max_iter=10))
        trace = label_prf_trace(result.assignments, bench.truth)
        start.append(trace[0])
        final.append(trace[-1])

        baseline = dgm_run(
            bench.camera_a, bench.camera_b, DgmConfig(max_iter=10, update_metric=False)
        )
        static.append(label_prf(baseline.assignment, bench.truth)[2])

    assert 0.4 <= np.mean(start) <= 0.7
    assert np.mean(final) - np.mean(start) >= 0.10
    assert np.mean(final) > np.mean(static)


def test_default_seed_does_not_regress():
    """Test that the final F-score on the default preset is at least the initial one."""
    bench = generate_benchmark(PresetLoader().load("default").synth)
    result = dgm_run(bench.camera_a, bench.camera_b)
    trace = label_prf_trace(result.assignments, bench.truth)
    assert trace[-1] >= trace[0]


@pytest.mark.parametrize("seed", SEEDS)
def test_same_identity_neighborhoods_overlap_more(seed):
    """Test that true pairs share kNN members more often than random pairs."""
    bench = _benchmark("default", seed)
    metric = Metric.identity(bench.camera_a.dim)
    same, diff = knn_overlap_stats(bench.camera_a, bench.camera_b, metric, 5, bench.truth)
    assert same > diff


@pytest.mark.parametrize("preset", ["distractors", "segments"])
def test_corruption_costs_little_rank1(preset):
    """Test that distractors or segment splits lose at most 15 seed-averaged rank-1 points."""
    rank1 = {}
    for name in ("default", preset):
        scores = []
        for seed in SEEDS:
            bench = _benchmark(name, seed)
            result = dgm_run(bench.camera_a, bench.camera_b)
            curve, _ = reid_scores(result.metric, bench.query, bench.gallery)
            scores.append(curve[0])
        rank1[name] = np.mean(scores)
    assert rank1["default"] - rank1[preset] <= 0.15
