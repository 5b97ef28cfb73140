"""Scenario composition and parameter sweeps over farm configurations.

A Scenario bundles a protection layout with failure/repair rates and one
way of fixing the interception rate: directly, via an operating curve at
a false positive rate, or via an operating curve plus a per-window
budget. Sweeps replace scenario fields over a Cartesian grid and emit
one record per point, in axis order then value order, with unbounded
results carried as infinities for the output layer to render.
"""

import itertools
import math
from dataclasses import dataclass, replace

from .markov import MarkovChain, MttdlResult, mttdl_hitting_time, mttdl_laplace
from .prediction import (
    ReplacementCost,
    RocCurve,
    false_replacement_cost,
    false_replacement_slope,
    fpr_for_budget,
    roc_from_auc,
    tpr_for_fpr,
)
from .scheme import ProtectionScheme

__all__ = [
    "ComparisonTable",
    "Scenario",
    "SweepPlan",
    "figure_series",
    "protection_comparison",
    "run_sweep",
]

SENTINEL_DAYS = 1e13  # beyond this a table cell prints as "--"

SWEEP_AXES = ("mttf_hours", "mttr_hours", "tpr", "fpr", "budget")
_OUTPUTS = ("mttdl", "cost", "both")


@dataclass(frozen=True)
class Scenario:
    """One farm configuration ready to be solved."""

    scheme: ProtectionScheme
    mttf_hours: float
    mttr_hours: float
    tpr: float | None = None
    roc: RocCurve | None = None
    fpr: float | None = None
    budget: float | None = None
    cost: ReplacementCost | None = None

    def __post_init__(self):
        if not self.mttf_hours > 0.0:
            raise ValueError(f"mttf_hours must be positive, got {self.mttf_hours}")
        if not self.mttr_hours > 0.0:
            raise ValueError(f"mttr_hours must be positive, got {self.mttr_hours}")
        if self.tpr is not None:
            if not 0.0 <= self.tpr <= 1.0:
                raise ValueError(f"tpr must lie in [0, 1], got {self.tpr}")
            if self.fpr is not None or self.budget is not None:
                raise ValueError("give either tpr or an operating-curve route, not both")
        if self.fpr is not None and self.budget is not None:
            raise ValueError("give either fpr or budget, not both")
        if self.fpr is not None and not 0.0 <= self.fpr <= 1.0:
            raise ValueError(f"fpr must lie in [0, 1], got {self.fpr}")
        if self.budget is not None and self.budget < 0.0:
            raise ValueError(f"budget must be non-negative, got {self.budget}")
        if (self.fpr is not None or self.budget is not None) and self.roc is None:
            raise ValueError("fpr or budget need an operating curve (roc)")
        if self.budget is not None and self.cost is None:
            raise ValueError("budget needs a cost model to convert into fpr")

    def with_overrides(self, **fields) -> "Scenario":
        return replace(self, **fields)

    def resolved_fpr(self) -> float | None:
        if self.fpr is not None:
            return self.fpr
        if self.budget is not None:
            return fpr_for_budget(self.cost, self.budget)
        return None

    def resolved_tpr(self) -> float:
        if self.tpr is not None:
            return self.tpr
        fpr = self.resolved_fpr()
        if fpr is None:
            return 0.0
        return tpr_for_fpr(self.roc, fpr)

    def effective_failure_rate(self) -> float:
        return (1.0 - self.resolved_tpr()) / self.mttf_hours

    def chain(self) -> MarkovChain:
        return MarkovChain(
            total_disks=self.scheme.total_disks,
            failure_rate=self.effective_failure_rate(),
            repair_rate=1.0 / self.mttr_hours,
            loss=self.scheme.loss_vector(),
        )

    def mttdl(self, method: str = "laplace") -> MttdlResult:
        """Solve the scenario; full interception returns the unbounded sentinel."""
        loss = self.scheme.loss_vector()
        if self.resolved_tpr() >= 1.0:
            return MttdlResult(
                mttdl_hours=math.inf,
                method=method,
                saturation=loss.saturation,
                loss_values=loss.values,
                warnings=("all failures intercepted, no data loss",),
            )
        if method == "laplace":
            return mttdl_laplace(self.chain(), extended=True)
        if method == "hitting_time":
            return mttdl_hitting_time(self.chain())
        raise ValueError(f"unknown method {method!r}")

    def mttdl_days(self, method: str = "laplace") -> float:
        return self.mttdl(method).mttdl_days

    def cost_per_window(self) -> float:
        if self.cost is None:
            raise ValueError("scenario has no cost model")
        fpr = self.resolved_fpr()
        if fpr is None:
            raise ValueError("cost output needs fpr or budget in the scenario")
        return false_replacement_cost(self.cost, fpr)


@dataclass(frozen=True)
class SweepPlan:
    """Axes to sweep over a base scenario and which outputs to compute."""

    base: Scenario
    axes: tuple[tuple[str, tuple[float, ...]], ...] = ()
    output: str = "mttdl"

    def __post_init__(self):
        if self.output not in _OUTPUTS:
            raise ValueError(f"output must be one of {_OUTPUTS}, got {self.output!r}")
        seen = set()
        for name, values in self.axes:
            if name not in SWEEP_AXES:
                raise ValueError(f"unknown sweep axis {name!r}; choose from {SWEEP_AXES}")
            if name in seen:
                raise ValueError(f"axis {name!r} listed twice")
            seen.add(name)
            if not values:
                raise ValueError(f"axis {name!r} has no values")


def run_sweep(plan: SweepPlan) -> list[dict[str, float]]:
    """One record per grid point, ordered by axis order then value order.

    Every axis value is validated against the scenario before any row is
    computed, so a bad point fails the whole sweep by name instead of
    truncating the output.
    """
    names = [name for name, _ in plan.axes]
    grids = [values for _, values in plan.axes]

    for name, values in plan.axes:
        for value in values:
            try:
                plan.base.with_overrides(**{name: value})
            except ValueError as exc:
                raise ValueError(f"axis {name!r} value {value!r}: {exc}") from exc

    rows: list[dict[str, float]] = []
    for combo in itertools.product(*grids):
        scenario = plan.base.with_overrides(**dict(zip(names, combo)))
        row: dict[str, float] = dict(zip(names, combo))
        if plan.output in ("mttdl", "both"):
            row["mttdl_days"] = scenario.mttdl_days()
        if plan.output in ("cost", "both"):
            row["cost_per_window"] = scenario.cost_per_window()
        rows.append(row)
    return rows


@dataclass(frozen=True)
class ComparisonTable:
    """MTTDL grid over (tpr, mttr) for several equal-capacity layouts."""

    headers: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    sentinel_days: float = SENTINEL_DAYS

    def cell_text(self, column: int, value: float) -> str:
        if column < 2:
            return f"{value:g}"
        if math.isinf(value) or value > self.sentinel_days:
            return "--"
        return f"{value:.6g}"

    def render(self) -> str:
        table = [list(self.headers)]
        for row in self.rows:
            table.append([self.cell_text(i, v) for i, v in enumerate(row)])
        widths = [max(len(line[i]) for line in table) for i in range(len(self.headers))]
        lines = ["  ".join(cell.rjust(w) for cell, w in zip(line, widths)) for line in table]
        return "\n".join(lines)

    def to_records(self) -> list[dict[str, float]]:
        return [dict(zip(self.headers, row)) for row in self.rows]


_COMPARISON_LAYOUTS = (
    ("raid6_8+2_days", ProtectionScheme(8, 2, 10000)),
    ("raid_tp_8+3_days", ProtectionScheme(8, 3, 10000)),
    ("rs_16+4_days", ProtectionScheme(16, 4, 5000)),
)


def protection_comparison(
    mttf_hours: float,
    tpr_list: tuple[float, ...] | list[float],
    mttr_list: tuple[float, ...] | list[float],
) -> ComparisonTable:
    """Three-way MTTDL comparison at equal data capacity (80,000 data disks).

    Columns cover 10,000 arrays of 8+2, 10,000 arrays of 8+3, and 5,000
    arrays of 16+4, in days; cells beyond the sentinel render as "--".
    """
    if not tpr_list or not mttr_list:
        raise ValueError("tpr_list and mttr_list must be non-empty")
    rows = []
    for tpr in tpr_list:
        for mttr in mttr_list:
            cells = [tpr, mttr]
            for _, scheme in _COMPARISON_LAYOUTS:
                scenario = Scenario(
                    scheme=scheme, mttf_hours=mttf_hours, mttr_hours=mttr, tpr=tpr
                )
                cells.append(scenario.mttdl_days())
            rows.append(tuple(cells))
    headers = ("tpr", "mttr_hours") + tuple(name for name, _ in _COMPARISON_LAYOUTS)
    return ComparisonTable(headers=headers, rows=tuple(rows))


_FIGURE_SCHEME = ProtectionScheme(8, 2, 10000)
_FIGURE_MTTF_HOURS = 5 * 365 * 24.0
_FIGURE_WINDOW_HOURS = 6.0
_FIGURE_COST = ReplacementCost(
    cost_per_disk=375.0,
    lifetime_windows=_FIGURE_MTTF_HOURS / _FIGURE_WINDOW_HOURS,
    total_disks=_FIGURE_SCHEME.total_disks,
    failure_rate_per_window=_FIGURE_WINDOW_HOURS / _FIGURE_MTTF_HOURS,
)
_FIGURE_AUCS = (0.90, 0.95, 0.97, 0.99)
_FIGURE_BUDGET_FRACTIONS = (0.002, 0.005, 0.01)


def figure_series(figure_id: int, resolution: int = 50) -> dict:
    """Numeric series behind the standard report figures.

    3: MTTDL vs interception rate for repair means of 5..10 hours.
    4: false-replacement cost vs false positive rate (a line through 0).
    5: MTTDL vs per-window budget for several operating-curve areas.
    6: MTTDL vs operating-curve area for several fixed budgets.

    Budgets are absolute currency per replacement window (6-hour windows,
    375 per disk, 100,000 disks); each series is labelled with its value.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    base = Scenario(scheme=_FIGURE_SCHEME, mttf_hours=_FIGURE_MTTF_HOURS, mttr_hours=5.0)

    if figure_id == 3:
        tprs = [i / resolution for i in range(resolution)]
        series = []
        for mttr in (5, 6, 7, 8, 9, 10):
            scenario = base.with_overrides(mttr_hours=float(mttr))
            points = [
                (tpr, scenario.with_overrides(tpr=tpr).mttdl_days()) for tpr in tprs
            ]
            series.append({"label": f"mttr_{mttr}h", "points": points})
        return {"figure": 3, "x": "tpr", "y": "mttdl_days", "series": series}

    if figure_id == 4:
        fprs = [i / resolution for i in range(resolution + 1)]
        points = [(fpr, false_replacement_cost(_FIGURE_COST, fpr)) for fpr in fprs]
        return {
            "figure": 4,
            "x": "fpr",
            "y": "cost_per_window",
            "series": [{"label": "cost", "points": points}],
        }

    slope = false_replacement_slope(_FIGURE_COST)

    if figure_id == 5:
        top = 0.05 * slope
        budgets = [top * i / resolution for i in range(resolution + 1)]
        series = []
        for target in _FIGURE_AUCS:
            curve = roc_from_auc(target)
            scenario = base.with_overrides(roc=curve, budget=0.0, cost=_FIGURE_COST)
            points = [
                (b, scenario.with_overrides(budget=b).mttdl_days()) for b in budgets
            ]
            series.append({"label": f"auc_{target}", "points": points})
        return {"figure": 5, "x": "budget_per_window", "y": "mttdl_days", "series": series}

    if figure_id == 6:
        lo, hi = 0.5, 0.995
        targets = [lo + (hi - lo) * i / resolution for i in range(resolution + 1)]
        curves = [roc_from_auc(t) for t in targets]
        series = []
        for fraction in _FIGURE_BUDGET_FRACTIONS:
            budget = fraction * slope
            points = []
            for target, curve in zip(targets, curves):
                scenario = base.with_overrides(roc=curve, budget=budget, cost=_FIGURE_COST)
                points.append((target, scenario.mttdl_days()))
            series.append({"label": f"budget_{budget:.6g}", "points": points})
        return {"figure": 6, "x": "auc", "y": "mttdl_days", "series": series}

    raise ValueError(f"figure_id must be 3, 4, 5 or 6, got {figure_id}")
