"""Dynamic graph matching: alternate matching, label re-weighting and metric
learning until the assignment settles.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .cost_graph import assignment_costs
from .errors import DegenerateLabelsError
from .matcher import dummy_cost_for, matching_objective, solve_assignment
from .metric_learn import (
    apg_optimize,
    build_training_pairs,
    camera_bias_c0,
    rescale_metric,
    total_loss,
)
from .models import Assignment, CameraGraph, CostMatrix, Metric, SoftLabelMatrix, validate_bundle
from .reweight import label_matrix, label_values, reweight_labels
from .schemas import DgmConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IterationRecord:
    """Summary of one iteration.

    ``G`` is the matching objective of the kept assignment under this
    iteration's costs; ``F`` is the metric loss after the update (None when
    the update was skipped because a label class was empty).
    """

    iter: int
    G: float
    F: Optional[float]
    accepted: bool
    num_positive: int
    num_dummy: int
    G_candidate: Optional[float] = None
    G_previous: Optional[float] = None
    F_before: Optional[float] = None
    metric_updated: bool = False

    def to_dict(self) -> dict:
        return {
            "iter": self.iter,
            "G": self.G,
            "F": self.F,
            "accepted": self.accepted,
            "num_positive": self.num_positive,
            "num_dummy": self.num_dummy,
        }


@dataclass
class DgmResult:
    """Final estimate plus the per-iteration trace."""

    assignment: Assignment
    labels: SoftLabelMatrix
    metric: Metric
    costs: CostMatrix
    dummy_cost: float
    history: List[IterationRecord] = field(default_factory=list)
    assignments: List[Assignment] = field(default_factory=list)
    metrics: List[Metric] = field(default_factory=list)


IterationCallback = Callable[[IterationRecord, Assignment, Metric], None]


class DynamicGraphMatcher:
    """Runs the alternating estimation loop for one pair of cameras."""

    def __init__(self, config: Optional[DgmConfig] = None):
        """Initialize matcher.

        Args:
            config: Run parameters (defaults when omitted)
        """
        self.config = config or DgmConfig()

    def _costs(self, a: CameraGraph, b: CameraGraph, metric: Metric) -> Tuple[CostMatrix, float]:
        costs = assignment_costs(a, b, metric, self.config.lambda_, self.config.k)
        return costs, dummy_cost_for(costs, self.config.dummy_cost_mode)

    def _update_metric(
        self, a: CameraGraph, b: CameraGraph, costs: CostMatrix,
        assignment: Assignment, metric: Metric, target_c0: float,
    ) -> Tuple[Metric, Optional[float], Optional[float], int]:
        """One metric solve on labels from (costs, assignment).

        Returns (metric, F before, F after, positives); the metric is kept
        and both losses are None when a label class is empty. With
        ``normalize_metric`` the solved metric is rescaled to ``target_c0``;
        the losses refer to the solve itself.
        """
        try:
            labels = reweight_labels(costs, assignment, self.config.label_mode)
        except DegenerateLabelsError as exc:
            logger.warning("skipping metric update: %s", exc)
            values = label_values(costs, assignment, self.config.label_mode)
            positives = int(np.count_nonzero(values > 0))
            return metric, None, None, positives

        pairs = build_training_pairs(a, b, labels, camera_bias_c0(a, b, metric))
        if not self.config.update_metric:
            loss = total_loss(metric, pairs)
            return metric, loss, loss, labels.num_positive

        learned, losses = apg_optimize(
            pairs, metric, max_steps=self.config.apg_max_steps, tol=self.config.apg_tol
        )
        logger.debug(
            "metric solve: %d pairs, %d steps, F %.6g -> %.6g",
            len(pairs), len(losses) - 1, losses[0], losses[-1],
        )
        if self.config.normalize_metric:
            learned = rescale_metric(a, b, learned, target_c0)
        return learned, losses[0], losses[-1], labels.num_positive

    def run(
        self, a: CameraGraph, b: CameraGraph, on_iteration: Optional[IterationCallback] = None
    ) -> DgmResult:
        """Estimate cross-camera labels for two cameras.

        Args:
            a: Camera A tracklets (rows of the assignment)
            b: Camera B tracklets (columns)
            on_iteration: Optional hook called after every iteration

        Returns:
            DgmResult with the final assignment, labels, metric and history
        """
        dim = validate_bundle(a, b)
        cfg = self.config

        metric = Metric.identity(dim)
        target_c0 = camera_bias_c0(a, b, metric)
        costs, dummy = self._costs(a, b, metric)
        assignment, objective = solve_assignment(costs, dummy)

        initial_f = None
        initial_labels = label_values(costs, assignment, cfg.label_mode)
        weighted = label_matrix(initial_labels)
        if weighted.pos_weight is not None and weighted.neg_weight is not None:
            pairs = build_training_pairs(a, b, weighted, target_c0)
            initial_f = total_loss(metric, pairs)

        record = IterationRecord(
            iter=0, G=objective, F=initial_f, accepted=True,
            num_positive=weighted.num_positive, num_dummy=assignment.num_dummy,
        )
        result = DgmResult(
            assignment=assignment, labels=weighted, metric=metric, costs=costs,
            dummy_cost=dummy, history=[record], assignments=[assignment], metrics=[metric],
        )
        self._report(record, assignment, metric, on_iteration)

        stable = 0
        previous_f = initial_f
        for t in range(1, cfg.max_iter + 1):
            metric, f_before, f_after, positives = self._update_metric(
                a, b, costs, assignment, metric, target_c0
            )

            costs, dummy = self._costs(a, b, metric)
            candidate, g_candidate = solve_assignment(costs, dummy)
            g_previous = matching_objective(costs, assignment, dummy)
            accepted = g_candidate < g_previous
            if accepted:
                assignment, objective = candidate, g_candidate
                stable = 0
            else:
                objective = g_previous
                stable += 1

            record = IterationRecord(
                iter=t, G=objective, F=f_after, accepted=accepted,
                num_positive=positives, num_dummy=assignment.num_dummy,
                G_candidate=g_candidate, G_previous=g_previous, F_before=f_before,
                metric_updated=f_after is not None and cfg.update_metric,
            )
            result.history.append(record)
            result.assignments.append(assignment)
            result.metrics.append(metric)
            self._report(record, assignment, metric, on_iteration)

            if stable >= cfg.stable_iterations and self._loss_settled(previous_f, f_after):
                logger.info("converged after %d iterations", t)
                break
            previous_f = f_after

        result.assignment = assignment
        result.metric = metric
        result.costs = costs
        result.dummy_cost = dummy
        result.labels = label_matrix(label_values(costs, assignment, cfg.label_mode))
        return result

    def _loss_settled(self, before: Optional[float], after: Optional[float]) -> bool:
        if before is None or after is None:
            return before is None and after is None
        return abs(before - after) <= self.config.converge_tol * max(abs(before), 1e-300)

    @staticmethod
    def _report(
        record: IterationRecord, assignment: Assignment, metric: Metric,
        on_iteration: Optional[IterationCallback],
    ) -> None:
        f_text = "n/a" if record.F is None else f"{record.F:.6g}"
        logger.info(
            "iteration %d: G=%.6g F=%s accepted=%s positives=%d dummies=%d",
            record.iter, record.G, f_text, record.accepted,
            record.num_positive, record.num_dummy,
        )
        if on_iteration is not None:
            on_iteration(record, assignment, metric)


def dgm_run(a: CameraGraph, b: CameraGraph, config: Optional[DgmConfig] = None) -> DgmResult:
    """Functional entry point: ``DynamicGraphMatcher(config).run(a, b)``."""
    return DynamicGraphMatcher(config).run(a, b)
