"""Two-step replicability analysis over an m x n p-value matrix.

Step 1 selects promising features (rows); Step 2 tests the partial
conjunction hypotheses of each selected feature sequentially for
u = 1, ..., n at level w_i * beta(|S|_v) * q / m, producing a lower bound
k_hat(i) on the number of studies where feature i has an effect. The two
steps share only the selection volume |S|_v, so the selection rule is
pluggable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .combine import CombiningMethod, combine_pvalues
from .partial_conjunction import pc_pvalue
from .pc_testing import WeightScheme
from .procedures import IDENTITY, ShapeFunction, ThresholdCollection, step_up

__all__ = [
    "SelectionRule",
    "ReplicabilityReport",
    "validate_matrix",
    "select_features",
    "khat_bounds",
    "realized_replicability_error",
]


@dataclass(frozen=True)
class SelectionRule:
    """Row-selection rule for Step 1.

    step_up_on_combined:         combine each row into a global-null p-value,
                                 then run the step-up procedure at level
                                 ``alpha`` with shape ``shape``.
    fixed_threshold_on_combined: select rows with combined p-value <= threshold.
    step_up_on_column:           run the step-up procedure on column ``column``.
    """

    kind: str
    alpha: float | None = None
    shape: ShapeFunction = IDENTITY
    threshold: float | None = None
    column: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("step_up_on_combined", "fixed_threshold_on_combined",
                             "step_up_on_column"):
            raise ValueError(f"unknown selection rule {self.kind!r}")
        if self.kind == "fixed_threshold_on_combined":
            if self.threshold is None or not 0.0 <= self.threshold <= 1.0:
                raise ValueError("fixed threshold rule needs threshold in [0, 1]")
        elif self.alpha is None or not 0.0 < self.alpha <= 1.0:
            raise ValueError("step-up rule needs alpha in (0, 1]")
        if self.kind == "step_up_on_column" and self.column is None:
            raise ValueError("column rule needs a study index")


@dataclass(frozen=True)
class ReplicabilityReport:
    """Selected features with their replicability lower bounds."""

    selected: frozenset[int]
    khat: dict[int, int]
    threshold_used: dict[int, float]
    selection_volume: float


def validate_matrix(mat) -> np.ndarray:
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] < 1 or mat.shape[1] < 1:
        raise ValueError("p-value matrix must be 2-dimensional and nonempty")
    if np.isnan(mat).any() or (mat < 0).any() or (mat > 1).any():
        raise ValueError("matrix entries must lie in [0, 1]")
    return mat


def select_features(mat, rule: SelectionRule, method: CombiningMethod,
                    ws: WeightScheme) -> frozenset[int]:
    """Apply the Step-1 selection rule; returns 0-based row indices."""
    mat = validate_matrix(mat)
    m, n = mat.shape
    if len(ws.prior_w) != m:
        raise ValueError("weight scheme sized for a different feature count")
    if rule.kind == "fixed_threshold_on_combined":
        combined = [combine_pvalues(row, method) for row in mat]
        return frozenset(i for i, c in enumerate(combined) if c <= rule.threshold)
    if rule.kind == "step_up_on_column":
        if not 0 <= rule.column < n:
            raise ValueError(f"column {rule.column} outside [0, {n})")
        values = list(mat[:, rule.column])
    else:
        values = [combine_pvalues(row, method) for row in mat]
    tc = ThresholdCollection(alpha=rule.alpha, m=m, prior_w=ws.prior_w,
                             shape=rule.shape)
    return step_up(values, tc, ws.penalty_v).indices


def khat_bounds(mat, selected: Sequence[int] | frozenset[int],
                method: CombiningMethod, ws: WeightScheme, q: float,
                beta: ShapeFunction = IDENTITY) -> ReplicabilityReport:
    """Step 2: sequential partial conjunction testing for each selected row.

    k_hat(i) = max{u: max(P_i^{1/n}, ..., P_i^{u/n}) <= w_i beta(|S|_v) q / m},
    with the empty maximum defined as 0. The running maximum is monotone, so
    the u loop exits at the first failure.
    """
    mat = validate_matrix(mat)
    m, n = mat.shape
    if not 0.0 < q <= 1.0:
        raise ValueError(f"q={q} outside (0, 1]")
    sel = frozenset(selected)
    if any(not 0 <= i < m for i in sel):
        raise IndexError("selected feature index out of range")
    vol = sum(ws.penalty_v[i] for i in sel)
    khat: dict[int, int] = {}
    thresholds: dict[int, float] = {}
    for i in sorted(sel):
        t = ws.prior_w[i] * beta(vol, m) * q / m
        thresholds[i] = t
        row = list(mat[i])
        k = 0
        for u in range(1, n + 1):
            if pc_pvalue(row, u, method) > t:
                break
            k = u
        khat[i] = k
    return ReplicabilityReport(sel, khat, thresholds, vol)


def realized_replicability_error(report: ReplicabilityReport,
                                 true_k: Sequence[int],
                                 penalty_v: Sequence[float]) -> float:
    """Weighted proportion of selected features with k_hat(i) > k(i),
    with the 0/0 = 0 convention."""
    total = sum(penalty_v[i] for i in report.selected)
    if total == 0.0:
        return 0.0
    bad = sum(penalty_v[i] for i in report.selected
              if report.khat[i] > true_k[i])
    return bad / total
