"""Tests for bundle, metric, labels, truth and report files."""

import json
import struct

import numpy as np
import pytest

from tracklink.bundle_io import (
    LabelRecord,
    assignment_from_labels,
    eval_scores,
    label_records,
    merge_report_eval,
    read_bundle,
    read_labels,
    read_metric,
    read_report,
    read_truth,
    write_bundle,
    write_labels,
    write_metric,
    write_report,
    write_truth,
)
from tracklink.config import DUMMY, LABELS_HEADER
from tracklink.driver import IterationRecord
from tracklink.errors import BadMagic, DimensionMismatch, FormatError, TruncatedFile, VersionUnsupported
from tracklink.models import Assignment, CameraGraph, CostMatrix, GroundTruth, Metric, Tracklet
from tracklink.reweight import reweight_labels
from tracklink.schemas import DgmConfig

from .helpers import make_graph


class TestFeatureBundle:
    """Test suite for write_bundle and read_bundle."""

    def test_round_trip(self, rng, tmp_path):
        """Test that frames survive at f32 precision and person ids exactly."""
        graph = CameraGraph((
            Tracklet(rng.normal(size=(3, 4)), 7),
            Tracklet(rng.normal(size=(1, 4))),
        ))
        path = tmp_path / "cam.dgmf"
        write_bundle(graph, path)
        loaded = read_bundle(path)
        assert loaded.person_ids == [7, None]
        for before, after in zip(graph, loaded):
            np.testing.assert_array_equal(after.frames, before.frames.astype(np.float32))

    def test_empty_graph(self, tmp_path):
        """Test that an empty camera writes dimension 0 and reads back empty."""
        path = tmp_path / "empty.dgmf"
        write_bundle(CameraGraph(()), path)
        assert len(read_bundle(path)) == 0

    def test_bad_magic(self, rng, tmp_path):
        """Test that a file starting with XXXX is rejected."""
        path = tmp_path / "cam.dgmf"
        write_bundle(make_graph(rng, 2, 3), path)
        path.write_bytes(b"XXXX" + path.read_bytes()[4:])
        with pytest.raises(BadMagic):
            read_bundle(path)

    def test_unsupported_version(self, tmp_path):
        """Test that version 2 is rejected."""
        path = tmp_path / "cam.dgmf"
        path.write_bytes(struct.pack("<4sIII", b"DGMF", 2, 0, 0))
        with pytest.raises(VersionUnsupported):
            read_bundle(path)

    def test_truncated(self, tmp_path):
        """Test 5 declared tracklets with only 4 present."""
        path = tmp_path / "cam.dgmf"
        body = b"".join(
            struct.pack("<II", pid, 1) + np.zeros(2, dtype="<f4").tobytes() for pid in range(4)
        )
        path.write_bytes(struct.pack("<4sIII", b"DGMF", 1, 5, 2) + body)
        with pytest.raises(TruncatedFile):
            read_bundle(path)

    def test_zero_dimension(self, tmp_path):
        """Test that tracklets declared with dimension 0 are rejected."""
        path = tmp_path / "cam.dgmf"
        path.write_bytes(struct.pack("<4sIII", b"DGMF", 1, 1, 0) + struct.pack("<II", 0, 1))
        with pytest.raises(DimensionMismatch):
            read_bundle(path)

    def test_unlabeled_bundle(self, rng, tmp_path):
        """Test that tracklets without person ids are stored with the 0xFFFFFFFF sentinel."""
        graph = CameraGraph(tuple(Tracklet(rng.normal(size=(2, 3))) for _ in range(4)))
        path = tmp_path / "cam.dgmf"
        write_bundle(graph, path)
        data = path.read_bytes()
        assert struct.unpack_from("<II", data, 16) == (0xFFFFFFFF, 2)
        assert read_bundle(path).person_ids == [None] * 4

    def test_sentinel_person_id_rejected(self, tmp_path):
        """Test that the sentinel itself cannot be written as a real person id."""
        graph = CameraGraph((Tracklet(np.zeros((1, 2)), 0xFFFFFFFF),))
        with pytest.raises(FormatError):
            write_bundle(graph, tmp_path / "cam.dgmf")

    def test_oversized_person_id(self, tmp_path):
        """Test that a person id outside u32 range cannot be written."""
        graph = CameraGraph((Tracklet(np.zeros((1, 2)), 2**32),))
        with pytest.raises(FormatError):
            write_bundle(graph, tmp_path / "cam.dgmf")


class TestMetricFile:
    """Test suite for write_metric and read_metric."""

    def test_bit_exact(self, rng, tmp_path):
        """Test that a metric round-trips bit for bit."""
        g = rng.normal(size=(4, 4))
        metric = Metric(g @ g.T)
        path = tmp_path / "metric.dgmm"
        write_metric(metric, path)
        np.testing.assert_array_equal(read_metric(path).m, metric.m)

    def test_feature_file_is_not_a_metric(self, rng, tmp_path):
        """Test that reading a feature bundle as a metric fails on the magic."""
        path = tmp_path / "cam.dgmf"
        write_bundle(make_graph(rng, 2, 2), path)
        with pytest.raises(BadMagic):
            read_metric(path)


class TestLabels:
    """Test suite for labels files."""

    def setup_method(self):
        """Set up the 2 x 2 fixture: matched diagonal."""
        self.costs = CostMatrix(np.array([[0.1, 0.3], [6.0, 5.0]]))
        self.assignment = Assignment((0, 1), 2)
        self.labels = reweight_labels(self.costs, self.assignment)

    def test_fixture_rows(self, tmp_path):
        """Test that the fixture gives four rows with the expected labels."""
        path = tmp_path / "labels.csv"
        write_labels(path, self.costs, self.assignment, self.labels, 2.85)
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(LABELS_HEADER)
        assert len(lines) == 5
        records = read_labels(path)
        assert [(r.i, r.j, r.y) for r in records] == [(0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1)]
        assert records[0].soft_label == pytest.approx(np.exp(-0.1))
        assert records[1].soft_label == -1.0
        assert records[1].cost == 0.3

    def test_dummy_rows(self):
        """Test that a dummy-assigned row gets an extra record with j = -1."""
        assignment = Assignment((0, DUMMY), 2)
        labels = reweight_labels(self.costs, assignment)
        records = label_records(self.costs, assignment, labels, 2.85)
        assert records[-1] == LabelRecord(1, DUMMY, 1, 2.85, 0.0)
        assert assignment_from_labels(records) == assignment

    def test_assignment_recovered(self, tmp_path):
        """Test that the written labels encode the assignment."""
        path = tmp_path / "labels.csv"
        write_labels(path, self.costs, self.assignment, self.labels, 2.85)
        assert assignment_from_labels(read_labels(path)) == self.assignment

    def test_bad_header(self, tmp_path):
        """Test that a labels file with the wrong header is rejected."""
        path = tmp_path / "labels.csv"
        path.write_text("a,b\n0,0\n")
        with pytest.raises(FormatError):
            read_labels(path)

    def test_bad_row(self, tmp_path):
        """Test that a non-numeric field is reported with its line."""
        path = tmp_path / "labels.csv"
        path.write_text(",".join(LABELS_HEADER) + "\n0,0,yes,0.1,0.5\n")
        with pytest.raises(FormatError, match=":2:"):
            read_labels(path)


class TestTruthFile:
    """Test suite for truth files."""

    def test_round_trip(self, tmp_path):
        """Test that rows without a partner survive as None."""
        truth = GroundTruth((2, None, 0), 4)
        path = tmp_path / "truth.csv"
        write_truth(truth, path)
        assert read_truth(path, num_columns=4) == truth
        assert path.read_text().splitlines()[2] == "1,-1"

    def test_inferred_columns(self, tmp_path):
        """Test that the column count defaults to the largest partner plus one."""
        path = tmp_path / "truth.csv"
        write_truth(GroundTruth((2, None, 0), 4), path)
        assert read_truth(path).num_columns == 3

    def test_rows_out_of_order(self, tmp_path):
        """Test that skipped rows are rejected."""
        path = tmp_path / "truth.csv"
        path.write_text("i,j\n0,1\n2,0\n")
        with pytest.raises(FormatError):
            read_truth(path)


class TestReport:
    """Test suite for JSON reports."""

    def setup_method(self):
        """Set up a two-record history."""
        self.history = [
            IterationRecord(iter=0, G=3.0, F=0.5, accepted=True, num_positive=4, num_dummy=1),
            IterationRecord(iter=1, G=2.5, F=0.25, accepted=True, num_positive=5, num_dummy=0),
        ]

    def test_layout(self, tmp_path):
        """Test the config echo, history and eval sections."""
        path = tmp_path / "report.json"
        write_report(path, DgmConfig(), self.history, eval_scores(0.5, 0.25, 1 / 3, np.array([0.5, 1.0]), 0.75))
        report = read_report(path)
        assert report["config"]["lambda"] == 0.5
        assert report["config"]["dummy_cost_mode"] == {"mode": "mean", "value": None}
        assert [r["G"] for r in report["history"]] == [3.0, 2.5]
        assert report["eval"]["cmc"] == [0.5, 1.0]
        assert report["eval"]["map"] == 0.75

    def test_deterministic(self, tmp_path):
        """Test that identical inputs give identical bytes."""
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        for path in (first, second):
            write_report(path, DgmConfig(k=3), self.history)
        assert first.read_bytes() == second.read_bytes()

    def test_merge_into_missing_file(self, tmp_path):
        """Test that merging creates a report with default label scores."""
        path = tmp_path / "report.json"
        merged = merge_report_eval(path, {"map": 0.5})
        assert merged["map"] == 0.5
        assert merged["f_score"] == 0.0
        assert json.loads(path.read_text())["history"] == []

    def test_merge_keeps_other_scores(self, tmp_path):
        """Test that retrieval scores do not overwrite label scores."""
        path = tmp_path / "report.json"
        write_report(path, DgmConfig(), self.history, eval_scores(0.9, 0.8, 0.85))
        merge_report_eval(path, {"cmc": np.array([0.25, 1.0]), "map": 0.6})
        report = read_report(path)
        assert report["eval"]["precision"] == 0.9
        assert report["eval"]["cmc"] == [0.25, 1.0]
        assert len(report["history"]) == 2
