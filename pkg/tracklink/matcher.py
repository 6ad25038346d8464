"""Bipartite assignment with dummy targets.

Every row of camera A is assigned either to a distinct column of camera B or
to the dummy node. Dummy capacity is unlimited: the solver appends one private
dummy column per row, each carrying the dummy cost, and runs a rectangular
Hungarian solve on the m x (n + m) matrix.
"""

import math
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .config import BRUTE_FORCE_MAX, DUMMY
from .errors import InstanceTooLarge, InvalidAssignment
from .models import Assignment, CostMatrix
from .schemas import DummyCostSpec


def dummy_cost_for(costs: CostMatrix, spec: DummyCostSpec) -> float:
    """Resolve the dummy assignment cost for a cost matrix."""
    if spec.mode == "mean":
        return costs.mean_cost
    if spec.mode == "fixed":
        return float(spec.value)
    return float(np.percentile(costs.c, spec.value))


def solve_assignment(costs: CostMatrix, dummy_cost: float) -> Tuple[Assignment, float]:
    """Minimum-cost assignment with unlimited dummy capacity.

    Among equal-cost optima the choice is scipy's, which is deterministic for a
    given matrix but not lexicographic; `brute_force_assignment` applies the
    lexicographic rule.

    Args:
        costs: m x n real assignment costs
        dummy_cost: Cost of assigning any row to the dummy node

    Returns:
        Tuple of (assignment, achieved objective)
    """
    if not math.isfinite(dummy_cost):
        raise ValueError(f"dummy cost must be finite, got {dummy_cost}")
    m, n = costs.shape
    augmented = np.hstack([costs.c, np.full((m, m), float(dummy_cost))])
    rows, cols = linear_sum_assignment(augmented)
    target = [DUMMY] * m
    for i, j in zip(rows, cols):
        target[i] = int(j) if j < n else DUMMY
    assignment = Assignment(tuple(target), n)
    return assignment, matching_objective(costs, assignment, dummy_cost)


def matching_objective(costs: CostMatrix, assignment: Assignment, dummy_cost: float) -> float:
    """Total cost sum_i cost(i, target[i]) with cost(i, DUMMY) = dummy_cost.

    Raises:
        InvalidAssignment: If the assignment does not fit the cost matrix
    """
    m, n = costs.shape
    if len(assignment) != m or assignment.num_columns != n:
        raise InvalidAssignment(
            f"assignment of shape ({len(assignment)}, {assignment.num_columns}) "
            f"does not fit costs of shape {costs.shape}"
        )
    total = 0.0
    for i, j in enumerate(assignment.target):
        total += dummy_cost if j == DUMMY else float(costs.c[i, j])
    return total


def brute_force_assignment(costs: CostMatrix, dummy_cost: float) -> Tuple[Assignment, float]:
    """Exhaustive optimum over all feasible assignments (m, n <= 8).

    Ties go to the lexicographically smallest target sequence, with real
    columns ordered before the dummy.
    """
    m, n = costs.shape
    if m > BRUTE_FORCE_MAX or n > BRUTE_FORCE_MAX:
        raise InstanceTooLarge(
            f"exhaustive search is limited to {BRUTE_FORCE_MAX}x{BRUTE_FORCE_MAX}, got {m}x{n}"
        )
    c = costs.c
    # Cheapest completion of rows i.. ignoring column conflicts, for pruning
    row_floor = np.minimum(c.min(axis=1), dummy_cost)
    tail_floor = np.concatenate([np.cumsum(row_floor[::-1])[::-1], [0.0]])

    best_total = math.inf
    best: Optional[List[int]] = None
    partial: List[int] = []
    used = [False] * n

    def search(i: int, running: float) -> None:
        nonlocal best_total, best
        if i == m:
            if running < best_total:
                best_total, best = running, list(partial)
            return
        if running + tail_floor[i] > best_total:
            return
        for j in range(n + 1):
            if j < n:
                if used[j]:
                    continue
                used[j] = True
                partial.append(j)
                search(i + 1, running + c[i, j])
                partial.pop()
                used[j] = False
            else:
                partial.append(DUMMY)
                search(i + 1, running + dummy_cost)
                partial.pop()

    search(0, 0.0)
    assignment = Assignment(tuple(best), n)
    return assignment, matching_objective(costs, assignment, dummy_cost)
