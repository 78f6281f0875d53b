"""Multiple testing of a family of partial conjunction hypotheses over a
group layout, and the realized weighted false discovery proportion used to
score procedures in simulations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .combine import CombiningMethod
from .partial_conjunction import pc_pvalue
from .procedures import RejectionSet, ThresholdCollection, step_up

__all__ = [
    "GroupLayout",
    "WeightScheme",
    "compute_pc_pvalues",
    "test_pc_family",
    "realized_weighted_fdp",
]

_NORM_RTOL = 1e-9


@dataclass(frozen=True)
class GroupLayout:
    """Partition of M hypotheses (0-based indices) into G disjoint groups,
    with a per-group partial conjunction parameter u_g."""

    groups: tuple[tuple[int, ...], ...]
    u: tuple[int, ...]

    def __post_init__(self) -> None:
        groups = tuple(tuple(g) for g in self.groups)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "u", tuple(self.u))
        if len(self.u) != len(groups):
            raise ValueError("u must have one entry per group")
        seen: set[int] = set()
        for g, members in enumerate(groups):
            if not members:
                raise ValueError(f"group {g} is empty")
            if seen & set(members):
                raise ValueError("groups must be disjoint")
            seen.update(members)
            if not 1 <= self.u[g] <= len(members):
                raise ValueError(f"u[{g}]={self.u[g]} outside [1, {len(members)}]")
        if seen != set(range(len(seen))):
            raise ValueError("groups must cover 0..M-1")

    @property
    def total(self) -> int:
        return sum(len(g) for g in self.groups)

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @classmethod
    def from_proportion(cls, groups: Sequence[Sequence[int]],
                        proportion: float) -> "GroupLayout":
        """Fill u_g = ceil(proportion * n_g): at least this fraction of the
        group must be signal for the partial conjunction alternative."""
        if not 0.0 < proportion <= 1.0:
            raise ValueError("proportion must lie in (0, 1]")
        u = tuple(max(1, math.ceil(proportion * len(g))) for g in groups)
        return cls(tuple(tuple(g) for g in groups), u)


@dataclass(frozen=True)
class WeightScheme:
    """Prior weights w and penalty weights v with sum(w_g * v_g) = G."""

    prior_w: tuple[float, ...]
    penalty_v: tuple[float, ...]

    def __post_init__(self) -> None:
        w = tuple(float(x) for x in self.prior_w)
        v = tuple(float(x) for x in self.penalty_v)
        object.__setattr__(self, "prior_w", w)
        object.__setattr__(self, "penalty_v", v)
        if len(w) != len(v):
            raise ValueError("weight vectors must have equal length")
        if any(x < 0 for x in w):
            raise ValueError("prior weights must be nonnegative")
        if any(x <= 0 for x in v):
            raise ValueError("penalty weights must be positive")
        g = len(w)
        total = sum(wi * vi for wi, vi in zip(w, v))
        if abs(total - g) > _NORM_RTOL * g:
            raise ValueError(f"sum(w_g * v_g) = {total}, expected G = {g}")

    @classmethod
    def unit(cls, g: int) -> "WeightScheme":
        return cls((1.0,) * g, (1.0,) * g)


def compute_pc_pvalues(p: Sequence[float], layout: GroupLayout,
                       method: CombiningMethod) -> list[float]:
    """Per-group partial conjunction p-value; one method applies to all
    groups."""
    if len(p) != layout.total:
        raise ValueError(f"expected {layout.total} p-values, got {len(p)}")
    return [
        pc_pvalue([p[i] for i in members], layout.u[g], method)
        for g, members in enumerate(layout.groups)
    ]


def test_pc_family(p: Sequence[float], layout: GroupLayout,
                   method: CombiningMethod, ws: WeightScheme,
                   tc: ThresholdCollection) -> RejectionSet:
    """Run the step-up procedure defined by ``tc`` on the G partial
    conjunction p-values with the group-level weights."""
    if tc.m != layout.n_groups:
        raise ValueError("threshold collection sized for a different family")
    pc = compute_pc_pvalues(p, layout, method)
    return step_up(pc, tc, ws.penalty_v)


def realized_weighted_fdp(rejected: Sequence[int] | frozenset[int],
                          true_null_groups: Sequence[int] | frozenset[int],
                          penalty_v: Sequence[float]) -> float:
    """Weighted false discovery proportion, with the 0/0 = 0 convention."""
    rej = set(rejected)
    nulls = set(true_null_groups)
    g = len(penalty_v)
    if any(not 0 <= i < g for i in rej | nulls):
        raise IndexError("group index out of range")
    total = sum(penalty_v[i] for i in rej)
    if total == 0.0:
        return 0.0
    false = sum(penalty_v[i] for i in rej & nulls)
    return false / total
