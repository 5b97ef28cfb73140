"""Failure-prediction quality and its coupling to farm reliability.

A predictor is summarised by its operating curve, true positive rate as
a function of false positive rate, using the one-parameter family

    tpr = (1 - (1 - fpr)^p) ** (1/p),   p >= 1.

p = 1 is an unbiased coin (tpr = fpr, area 0.5); growing p approaches
the ideal corner (area 1). Intercepting true failures thins the
effective per-disk failure rate by (1 - tpr); false alarms replace
healthy disks, at a cost linear in fpr:

    cost = c * fpr * (N - (N / T)(1 - exp(-lam T)))

with lifetime T and rate lam expressed in replacement-window units, the
only convention under which subtracting a per-window turnover from a
disk count is dimensionally coherent. Hour-denominated inputs are
converted once at the command-line boundary.
"""

import math
from dataclasses import dataclass, replace

from scipy.integrate import quad

from .markov import MarkovChain, MttdlResult, mttdl_laplace

__all__ = [
    "ReplacementCost",
    "RocCurve",
    "auc",
    "effective_failure_rate",
    "false_replacement_cost",
    "false_replacement_slope",
    "fpr_for_budget",
    "mttdl_with_budget",
    "roc_from_auc",
    "tpr_for_fpr",
]


@dataclass(frozen=True)
class RocCurve:
    """One-parameter operating curve; shape 1 is chance level, large is near ideal."""

    shape: float

    def __post_init__(self):
        if not (self.shape >= 1.0 and math.isfinite(self.shape)):
            raise ValueError(f"curve shape must be a finite value >= 1, got {self.shape}")


def tpr_for_fpr(curve: RocCurve, fpr: float) -> float:
    """True positive rate the curve delivers at a given false positive rate."""
    if not 0.0 <= fpr <= 1.0:
        raise ValueError(f"fpr must lie in [0, 1], got {fpr}")
    if curve.shape == 1.0:
        return float(fpr)  # identity curve, kept exact
    return (1.0 - (1.0 - fpr) ** curve.shape) ** (1.0 / curve.shape)


def auc(curve: RocCurve) -> float:
    """Area under the operating curve, in [0.5, 1).

    The chance-level curve integrates to exactly one half. Otherwise the
    area splits into the corner square below the curve's symmetry point
    plus two equal wings; substituting y = w^p turns the wing with the
    vertical tangent into a smooth integrand for adaptive quadrature
    (absolute error well under 1e-8).
    """
    p = curve.shape
    if p == 1.0:
        return 0.5
    corner = 2.0 ** (-1.0 / p)
    wing, err = quad(
        lambda y: y ** (1.0 / p) * (1.0 - y) ** (1.0 / p - 1.0),
        0.0,
        0.5,
        epsabs=1e-12,
        epsrel=1e-12,
    )
    if err > 1e-9:
        raise ArithmeticError(f"operating-curve quadrature error {err:.1e} too large")
    return corner * corner + 2.0 * wing / p


def roc_from_auc(target: float) -> RocCurve:
    """Curve whose area matches `target`, found by bisection on the shape.

    Round-trips with `auc` to within 1e-6.
    """
    if not 0.5 <= target < 1.0:
        raise ValueError(f"area target must lie in [0.5, 1), got {target}")
    if target == 0.5:
        return RocCurve(1.0)
    lo, hi = 1.0, 2.0
    while auc(RocCurve(hi)) < target:
        lo, hi = hi, hi * 2.0
        if hi > 2.0**80:
            raise ValueError(f"area target {target} too close to 1 to invert")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if auc(RocCurve(mid)) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return RocCurve(0.5 * (lo + hi))


def effective_failure_rate(rate: float, tpr: float) -> float:
    """Failure rate left after intercepting the predicted fraction of failures."""
    if rate < 0.0:
        raise ValueError(f"rate must be non-negative, got {rate}")
    if not 0.0 <= tpr <= 1.0:
        raise ValueError(f"tpr must lie in [0, 1], got {tpr}")
    return rate * (1.0 - tpr)


@dataclass(frozen=True)
class ReplacementCost:
    """False-alarm replacement economics, all times in replacement windows."""

    cost_per_disk: float
    lifetime_windows: float
    total_disks: int
    failure_rate_per_window: float

    def __post_init__(self):
        if not self.cost_per_disk > 0.0:
            raise ValueError(f"cost_per_disk must be positive, got {self.cost_per_disk}")
        if not self.lifetime_windows > 0.0:
            raise ValueError(f"lifetime_windows must be positive, got {self.lifetime_windows}")
        if self.total_disks < 1:
            raise ValueError(f"total_disks must be >= 1, got {self.total_disks}")
        if self.failure_rate_per_window < 0.0:
            raise ValueError(
                f"failure_rate_per_window must be non-negative, got {self.failure_rate_per_window}"
            )


def _healthy_disks(cost: ReplacementCost) -> float:
    """Disks on hand that are not failing anyway during one window."""
    lam_t = cost.failure_rate_per_window * cost.lifetime_windows
    turnover = cost.total_disks / cost.lifetime_windows * -math.expm1(-lam_t)
    healthy = cost.total_disks - turnover
    if healthy < 0.0:
        raise ValueError(
            "disk lifetime is shorter than one replacement window; cost model not applicable"
        )
    return healthy


def false_replacement_slope(cost: ReplacementCost) -> float:
    """Cost per window of replacing flagged healthy disks at fpr = 1."""
    return cost.cost_per_disk * _healthy_disks(cost)


def false_replacement_cost(cost: ReplacementCost, fpr: float) -> float:
    """Cost per window of false replacements; exactly linear in fpr."""
    if not 0.0 <= fpr <= 1.0:
        raise ValueError(f"fpr must lie in [0, 1], got {fpr}")
    if fpr == 0.0:
        return 0.0
    return false_replacement_slope(cost) * fpr


def fpr_for_budget(cost: ReplacementCost, budget: float) -> float:
    """Largest false positive rate the budget sustains, clamped to [0, 1]."""
    if budget < 0.0:
        raise ValueError(f"budget must be non-negative, got {budget}")
    return min(1.0, budget / false_replacement_slope(cost))


def mttdl_with_budget(
    budget: float,
    cost: ReplacementCost,
    chain: MarkovChain,
    *,
    roc: RocCurve | None = None,
    auc_target: float | None = None,
    extended: bool = False,
) -> MttdlResult:
    """MTTDL achievable when a per-window budget buys false-alarm headroom.

    The budget fixes the tolerable false positive rate, the operating
    curve converts it into an interception rate, and the chain is
    re-solved at the thinned failure rate. A budget large enough to clamp
    fpr at 1 makes interception certain and the result unbounded.
    """
    if (roc is None) == (auc_target is None):
        raise ValueError("provide exactly one of roc or auc_target")
    curve = roc if roc is not None else roc_from_auc(auc_target)
    fpr = fpr_for_budget(cost, budget)
    tpr = tpr_for_fpr(curve, fpr)
    if tpr >= 1.0:
        return MttdlResult(
            mttdl_hours=math.inf,
            method="laplace",
            saturation=chain.saturation,
            loss_values=chain.loss.values,
            warnings=("all failures intercepted, no data loss",),
        )
    adjusted = replace(chain, failure_rate=effective_failure_rate(chain.failure_rate, tpr))
    return mttdl_laplace(adjusted, extended=extended)
