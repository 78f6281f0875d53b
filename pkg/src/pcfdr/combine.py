"""Global-null p-value combiners and the Storey proportion-of-nulls estimator.

Every combiner maps a vector of p-values to a single p-value for the
intersection (global null) hypothesis and is non-decreasing in each
coordinate. Fisher and Stouffer assume independence; Simes additionally
tolerates positive dependence; Bonferroni and Hommel are valid under
arbitrary dependence; Simes-Storey is the minimum adjusted p-value of the
adaptive step-up procedure with the Storey plug-in and assumes independence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .numerics import chi_square_survival, std_normal_cdf, std_normal_quantile

__all__ = [
    "CombiningMethod",
    "DEFAULT_LAMBDA",
    "FISHER",
    "STOUFFER",
    "SIMES",
    "BONFERRONI",
    "HOMMEL",
    "DegenerateInputError",
    "fisher_combine",
    "stouffer_combine",
    "simes_combine",
    "bonferroni_combine",
    "hommel_combine",
    "storey_pi0",
    "simes_storey_combine",
    "combine_pvalues",
    "simes_storey",
]

DEFAULT_LAMBDA = 0.5

# Floor applied before log in Fisher's statistic so that p=0 yields a
# combined p-value of 0 instead of NaN.
_LOG_FLOOR = 1e-300

_KINDS = ("fisher", "stouffer", "simes", "bonferroni", "hommel", "simes_storey")


class DegenerateInputError(ValueError):
    """Raised when a combiner receives an input it cannot order, e.g.
    Stouffer with both a 0 and a 1 among the p-values."""


@dataclass(frozen=True)
class CombiningMethod:
    """A combining method, optionally carrying the Storey tuning parameter."""

    kind: str
    lam: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown combining method {self.kind!r}")
        if self.kind == "simes_storey":
            lam = DEFAULT_LAMBDA if self.lam is None else self.lam
            if not 0.0 < lam < 1.0:
                raise ValueError(f"lambda={lam} must lie in (0, 1)")
            object.__setattr__(self, "lam", lam)
        elif self.lam is not None:
            raise ValueError(f"method {self.kind!r} takes no lambda")


FISHER = CombiningMethod("fisher")
STOUFFER = CombiningMethod("stouffer")
SIMES = CombiningMethod("simes")
BONFERRONI = CombiningMethod("bonferroni")
HOMMEL = CombiningMethod("hommel")


def simes_storey(lam: float = DEFAULT_LAMBDA) -> CombiningMethod:
    return CombiningMethod("simes_storey", lam)


def _validate(p: Sequence[float]) -> list[float]:
    if len(p) == 0:
        raise ValueError("empty p-value list")
    out = []
    for x in p:
        if math.isnan(x) or not 0.0 <= x <= 1.0:
            raise ValueError(f"p-value {x} outside [0, 1]")
        out.append(float(x))
    return out


def fisher_combine(p: Sequence[float]) -> float:
    """Chi-square survival of -2 * sum(log p_i) with 2m degrees of freedom."""
    p = _validate(p)
    stat = -2.0 * sum(math.log(max(x, _LOG_FLOOR)) for x in p)
    return chi_square_survival(stat, 2 * len(p))


def stouffer_combine(p: Sequence[float]) -> float:
    """1 - Phi(sum(Phi^{-1}(1 - p_i)) / sqrt(m))."""
    p = _validate(p)
    if 0.0 in p and 1.0 in p:
        raise DegenerateInputError("Stouffer combiner with both p=0 and p=1")
    if 0.0 in p:
        return 0.0
    if 1.0 in p:
        return 1.0
    z = sum(std_normal_quantile(1.0 - x) for x in p)
    return 1.0 - std_normal_cdf(z / math.sqrt(len(p)))


def simes_combine(p: Sequence[float]) -> float:
    """min_k m * p_(k) / k, capped at 1."""
    p = sorted(_validate(p))
    m = len(p)
    return min(1.0, min(m * pk / (k + 1) for k, pk in enumerate(p)))


def bonferroni_combine(p: Sequence[float]) -> float:
    """min(m * p_(1), 1)."""
    p = _validate(p)
    return min(1.0, len(p) * min(p))


def hommel_combine(p: Sequence[float]) -> float:
    """min(H_m * simes, 1) with H_m the m-th harmonic number."""
    p = _validate(p)
    h = sum(1.0 / j for j in range(1, len(p) + 1))
    return min(1.0, h * simes_combine(p))


def storey_pi0(p: Sequence[float], lam: float = DEFAULT_LAMBDA) -> float:
    """(W(lam) + 1) / ((1 - lam) * m) with W(lam) = #{i: p_i > lam}."""
    p = _validate(p)
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lambda={lam} must lie in (0, 1)")
    w = sum(1 for x in p if x > lam)
    return (w + 1) / ((1.0 - lam) * len(p))


def simes_storey_combine(p: Sequence[float], lam: float = DEFAULT_LAMBDA) -> float:
    """Minimum adjusted p-value of the Storey-adaptive step-up procedure.

    Returns 1 when the smallest p-value exceeds lam; otherwise the Simes
    minimum restricted to {k: p_(k) <= lam}, inflated by m * pi0_hat(lam).
    """
    ps = sorted(_validate(p))
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lambda={lam} must lie in (0, 1)")
    if ps[0] > lam:
        return 1.0
    m = len(ps)
    pi0 = storey_pi0(ps, lam)
    best = min(m * pi0 * pk / (k + 1) for k, pk in enumerate(ps) if pk <= lam)
    return min(1.0, best)


def combine_pvalues(p: Sequence[float], method: CombiningMethod) -> float:
    """Dispatch to the combiner named by ``method``."""
    if method.kind == "fisher":
        return fisher_combine(p)
    if method.kind == "stouffer":
        return stouffer_combine(p)
    if method.kind == "simes":
        return simes_combine(p)
    if method.kind == "bonferroni":
        return bonferroni_combine(p)
    if method.kind == "hommel":
        return hommel_combine(p)
    return simes_storey_combine(p, method.lam)
