"""Command-line interface for tracklink."""

import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Tuple

import click
import yaml

from .bundle_io import (
    assignment_from_labels,
    eval_scores,
    merge_report_eval,
    read_bundle,
    read_labels,
    read_metric,
    read_truth,
    write_bundle,
    write_labels,
    write_metric,
    write_report,
    write_truth,
)
from .config import DGM_DEFAULTS, EVAL_DEFAULTS, EXIT_CODES
from .config_parser import ConfigParser
from .driver import DynamicGraphMatcher
from .errors import NumericalError
from .evaluation import label_prf, reid_scores
from .preprocess import pca_fit_graphs, preprocess_graph
from .preset_loader import PresetLoader
from .schemas import DgmConfig, SynthConfig
from .synth import generate_benchmark


@contextmanager
def _exit_on_error() -> Iterator[None]:
    """Translate failures into an ``Error:`` line and the matching exit code."""
    try:
        yield
    except NumericalError as e:
        click.echo(f"Error: Numerical failure - {e}", err=True)
        sys.exit(EXIT_CODES["NUMERICAL"])
    except FileNotFoundError as e:
        click.echo(f"Error: File not found - {e}", err=True)
        sys.exit(EXIT_CODES["INPUT"])
    except yaml.YAMLError as e:
        click.echo(f"Error: Invalid YAML format - {e}", err=True)
        sys.exit(EXIT_CODES["INPUT"])
    except json.JSONDecodeError as e:
        click.echo(f"Error: Invalid JSON format - {e}", err=True)
        sys.exit(EXIT_CODES["INPUT"])
    except ValueError as e:
        click.echo(f"Error: Invalid input - {e}", err=True)
        sys.exit(EXIT_CODES["INPUT"])
    except OSError as e:
        click.echo(f"Error: File system error - {e}", err=True)
        sys.exit(EXIT_CODES["INPUT"])


def _with_overrides(model: Any, overrides: Dict[str, Any]) -> Any:
    """Re-validate ``model`` with the options the user actually passed."""
    given = {k: v for k, v in overrides.items() if v is not None}
    if not given:
        return model
    data = model.model_dump(by_alias=True)
    data.update(given)
    return type(model).model_validate(data)


@click.group()
@click.option("--verbose", "-v", count=True, help="Log progress (-v info, -vv debug)")
def main(verbose: int):
    """tracklink - unsupervised cross-camera label estimation for tracklets.

    Estimates which tracklet in camera A shows the same person as which
    tracklet in camera B, learning a Mahalanobis metric along the way.
    """
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


@main.command()
@click.option("--preset", type=str, help="Name of built-in preset to start from")
@click.option(
    "--config", "config_path", type=click.Path(exists=True),
    help="YAML/JSON config with a synth section",
)
@click.option("--identities", type=int, help="Number of shared identities")
@click.option("--dim", type=int, help="Feature dimension")
@click.option("--latent", type=int, help="Identity (signal) dimension")
@click.option("--noise", type=float, help="Per-frame noise standard deviation")
@click.option("--nuisance", type=float, help="Per-tracklet appearance variation")
@click.option("--camera-shift", type=float, help="Strength of the per-camera transform")
@click.option("--min-frames", type=int, help="Fewest frames per tracklet")
@click.option("--max-frames", type=int, help="Most frames per tracklet")
@click.option("--distractors", type=float, help="Fraction of extra one-camera persons")
@click.option("--segments", type=float, help="Fraction of identities split into two tracklets")
@click.option("--test-identities", type=int, help="Size of the held-out query/gallery split")
@click.option("--seed", type=int, help="Random seed")
@click.option("--out", "out_dir", type=click.Path(), required=True, help="Output directory")
def synth(
    preset: Optional[str],
    config_path: Optional[str],
    identities: Optional[int],
    dim: Optional[int],
    latent: Optional[int],
    noise: Optional[float],
    nuisance: Optional[float],
    camera_shift: Optional[float],
    min_frames: Optional[int],
    max_frames: Optional[int],
    distractors: Optional[float],
    segments: Optional[float],
    test_identities: Optional[int],
    seed: Optional[int],
    out_dir: str,
):
    """Generate a synthetic two-camera benchmark.

    Writes camera_a.dgmf, camera_b.dgmf, truth.csv, query.dgmf and gallery.dgmf.
    """
    if preset and config_path:
        click.echo("Error: Cannot specify both --preset and --config", err=True)
        sys.exit(EXIT_CODES["INPUT"])

    with _exit_on_error():
        if preset:
            click.echo(f"Loading preset: {preset}", err=True)
            base = PresetLoader().load(preset).synth
        elif config_path:
            click.echo(f"Loading config: {config_path}", err=True)
            base = ConfigParser().parse(config_path).synth
        else:
            base = SynthConfig()
        cfg = _with_overrides(base, {
            "num_identities": identities,
            "feature_dim": dim,
            "latent_dim": latent,
            "camera_noise": noise,
            "nuisance_scale": nuisance,
            "camera_shift": camera_shift,
            "min_frames": min_frames,
            "max_frames": max_frames,
            "distractor_frac": distractors,
            "segment_frac": segments,
            "test_identities": test_identities,
            "rng_seed": seed,
        })

        bench = generate_benchmark(cfg)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_bundle(bench.camera_a, out / "camera_a.dgmf")
        write_bundle(bench.camera_b, out / "camera_b.dgmf")
        write_truth(bench.truth, out / "truth.csv")
        write_bundle(bench.query, out / "query.dgmf")
        write_bundle(bench.gallery, out / "gallery.dgmf")

    click.echo(
        f"Wrote {len(bench.camera_a)} + {len(bench.camera_b)} tracklets "
        f"({bench.truth.num_pairs} true pairs) to {out}/",
        err=True,
    )


@main.command()
@click.option("--camera-a", type=click.Path(exists=True), required=True, help="Camera A bundle")
@click.option("--camera-b", type=click.Path(exists=True), required=True, help="Camera B bundle")
@click.option(
    "--config", "config_path", type=click.Path(exists=True),
    help="YAML/JSON config with a dgm section",
)
@click.option("--lambda", "lam", type=float, help="Weight of the neighborhood cost")
@click.option("--k", type=int, help="Neighborhood size")
@click.option("--max-iter", type=int, help="Maximum iterations")
@click.option("--dummy-cost", type=str, help="mean, fixed:VALUE or percentile:P")
@click.option("--label-mode", type=click.Choice(["soft", "hard"]), help="Label re-weighting")
@click.option("--static", is_flag=True, help="Keep the metric fixed (graph matching baseline)")
@click.option("--seed", type=int, help="Random seed recorded with the run")
@click.option(
    "--truth", "truth_path", type=click.Path(exists=True), help="Truth CSV to score the labels"
)
@click.option("--out", "out_dir", type=click.Path(), required=True, help="Output directory")
def estimate(
    camera_a: str,
    camera_b: str,
    config_path: Optional[str],
    lam: Optional[float],
    k: Optional[int],
    max_iter: Optional[int],
    dummy_cost: Optional[str],
    label_mode: Optional[str],
    static: bool,
    seed: Optional[int],
    truth_path: Optional[str],
    out_dir: str,
):
    """Estimate cross-camera labels.

    Writes labels.csv, metric.dgmm and report.json.
    """
    with _exit_on_error():
        base = ConfigParser().parse(config_path).dgm if config_path else DgmConfig()
        cfg = _with_overrides(base, {
            "lambda": lam,
            "k": k,
            "max_iter": max_iter,
            "dummy_cost_mode": dummy_cost,
            "label_mode": label_mode,
            "update_metric": False if static else None,
            "rng_seed": seed,
        })

        a = read_bundle(camera_a)
        b = read_bundle(camera_b)
        click.echo(f"Matching {len(a)} x {len(b)} tracklets...", err=True)
        result = DynamicGraphMatcher(cfg).run(a, b)

        scores = None
        if truth_path:
            truth = read_truth(truth_path, num_columns=len(b))
            scores = eval_scores(*label_prf(result.assignment, truth))

        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_labels(
            out / "labels.csv", result.costs, result.assignment, result.labels, result.dummy_cost
        )
        write_metric(result.metric, out / "metric.dgmm")
        write_report(out / "report.json", cfg, result.history, scores)

    click.echo(
        f"{len(result.history) - 1} iteration(s), "
        f"{len(result.assignment) - result.assignment.num_dummy} matched, "
        f"{result.assignment.num_dummy} dummy",
        err=True,
    )
    if scores:
        click.echo(f"F-score {scores['f_score']:.4f}", err=True)
    click.echo(f"Wrote results to {out}/", err=True)


@main.command(name="eval")
@click.option(
    "--labels", "labels_path", type=click.Path(exists=True), required=True, help="labels.csv"
)
@click.option(
    "--truth", "truth_path", type=click.Path(exists=True), required=True, help="truth.csv"
)
@click.option("--report", "report_path", type=click.Path(), required=True, help="Report to update")
def eval_labels(labels_path: str, truth_path: str, report_path: str):
    """Score estimated labels against ground truth."""
    with _exit_on_error():
        assignment = assignment_from_labels(read_labels(labels_path))
        truth = read_truth(truth_path, num_columns=assignment.num_columns)
        precision, recall, f_score = label_prf(assignment, truth)
        merge_report_eval(report_path, {
            "precision": precision, "recall": recall, "f_score": f_score,
        })

    click.echo(f"precision {precision:.4f}")
    click.echo(f"recall    {recall:.4f}")
    click.echo(f"f_score   {f_score:.4f}")


@main.command()
@click.option(
    "--metric", "metric_path", type=click.Path(exists=True), required=True, help="metric.dgmm"
)
@click.option("--query", type=click.Path(exists=True), required=True, help="Query bundle")
@click.option("--gallery", type=click.Path(exists=True), required=True, help="Gallery bundle")
@click.option(
    "--mode", type=click.Choice(["mean", "min_regularized"]), default="mean", help="Set distance"
)
@click.option(
    "--alpha", type=float, default=EVAL_DEFAULTS["MIN_REGULARIZED_ALPHA"],
    help="Weight of the mean term in min_regularized",
)
@click.option("--report", "report_path", type=click.Path(), required=True, help="Report to update")
def reid(metric_path: str, query: str, gallery: str, mode: str, alpha: float, report_path: str):
    """Re-identification scores of a learned metric (CMC and mAP)."""
    with _exit_on_error():
        metric = read_metric(metric_path)
        curve, mean_ap = reid_scores(metric, read_bundle(query), read_bundle(gallery), mode, alpha)
        merge_report_eval(report_path, {"cmc": curve, "map": mean_ap})

    for rank in EVAL_DEFAULTS["CMC_RANKS"]:
        if rank <= len(curve):
            click.echo(f"rank-{rank:<3d} {curve[rank - 1]:.4f}")
    click.echo(f"mAP      {mean_ap:.4f}")


@main.command()
@click.option(
    "--in", "inputs", type=click.Path(exists=True), multiple=True, required=True,
    help="Input bundle (repeatable)",
)
@click.option(
    "--out", "outputs", type=click.Path(), multiple=True, required=True,
    help="Output bundle, one per --in",
)
@click.option("--dim", type=int, default=DGM_DEFAULTS["PCA_DIM"], help="Output dimension")
@click.option(
    "--pool-window", type=int, default=DGM_DEFAULTS["POOL_WINDOW"],
    help="Max-pooling window (1 disables)",
)
def pca(inputs: Tuple[str, ...], outputs: Tuple[str, ...], dim: int, pool_window: int):
    """Project bundles onto one PCA basis fitted on all of them, then max-pool."""
    if len(inputs) != len(outputs):
        click.echo("Error: --in and --out must be given the same number of times", err=True)
        sys.exit(EXIT_CODES["INPUT"])
    if pool_window < 1:
        click.echo("Error: --pool-window must be at least 1", err=True)
        sys.exit(EXIT_CODES["INPUT"])

    with _exit_on_error():
        graphs = [read_bundle(path) for path in inputs]
        model = pca_fit_graphs(graphs, dim)
        for graph, path in zip(graphs, outputs):
            write_bundle(preprocess_graph(graph, model, pool_window), path)

    click.echo(
        f"Projected {len(graphs)} bundle(s) from {model.d_raw} to {model.d_out} dims", err=True
    )


@main.command()
def presets():
    """List built-in synthetic presets."""
    loader = PresetLoader()
    names = loader.list_presets()
    if not names:
        click.echo("No presets found.")
        return
    click.echo("Available presets:")
    for name in names:
        description = loader.load(name).description
        click.echo(f"  - {name}" + (f": {description}" if description else ""))


if __name__ == "__main__":
    main()
