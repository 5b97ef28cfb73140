"""Reliability modelling for large disk farms.

Computes mean time to data loss (MTTDL) for farms protected by double
parity, triple parity, or general erasure codes, via an absorbing
failure chain solved two independent ways, quantifies how prediction
quality (tpr / fpr / operating-curve area) and false-replacement cost
move the result, and cross-checks everything with Monte Carlo
simulation.
"""

from .errors import AllCensoredError, ConditioningError, DegenerateChainError
from .markov import (
    MarkovChain,
    MttdlResult,
    mttdl_hitting_time,
    mttdl_laplace,
    trailing_minors_at_zero,
)
from .prediction import (
    ReplacementCost,
    RocCurve,
    auc,
    effective_failure_rate,
    false_replacement_cost,
    false_replacement_slope,
    fpr_for_budget,
    mttdl_with_budget,
    roc_from_auc,
    tpr_for_fpr,
)
from .scheme import (
    LossVector,
    ProtectionScheme,
    extend_until_certain,
    log_binomial,
    raid6_loss_vector,
    raid_tp_loss_vector,
    rs_loss_vector,
)
from .sim import (
    CompetingMixture,
    DiskFarm,
    Exponential,
    SimResult,
    Weibull,
    simulate_chain,
    simulate_farm,
    summarize,
)
from .sweep import (
    ComparisonTable,
    Scenario,
    SweepPlan,
    figure_series,
    protection_comparison,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AllCensoredError",
    "ComparisonTable",
    "CompetingMixture",
    "ConditioningError",
    "DegenerateChainError",
    "DiskFarm",
    "Exponential",
    "LossVector",
    "MarkovChain",
    "MttdlResult",
    "ProtectionScheme",
    "ReplacementCost",
    "RocCurve",
    "Scenario",
    "SimResult",
    "SweepPlan",
    "Weibull",
    "auc",
    "effective_failure_rate",
    "extend_until_certain",
    "false_replacement_cost",
    "false_replacement_slope",
    "figure_series",
    "fpr_for_budget",
    "log_binomial",
    "mttdl_hitting_time",
    "mttdl_laplace",
    "mttdl_with_budget",
    "protection_comparison",
    "raid6_loss_vector",
    "raid_tp_loss_vector",
    "roc_from_auc",
    "rs_loss_vector",
    "run_sweep",
    "simulate_chain",
    "simulate_farm",
    "summarize",
    "tpr_for_fpr",
    "trailing_minors_at_zero",
]
