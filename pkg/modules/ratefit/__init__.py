"""Rate fit package."""

from .fit_target_composite import CompositeFitTarget
from .fit_target_effrme import EffRmeFitTarget
from .fit_target_generic import FitObjective, RateTriple, _FitTargetGeneric
from .fitting import (
    SWEEP_COLUMNS,
    FitProblem,
    FitResult,
    SweepVariable,
    as_fit_target,
    fit_effective_rates,
    fit_residual,
    log_log_slope,
    norm_ratio_deviation,
    steady_residual,
    sweep_fit,
    with_sweep_value,
)

__all__ = [
    "SWEEP_COLUMNS",
    "CompositeFitTarget",
    "EffRmeFitTarget",
    "FitObjective",
    "FitProblem",
    "FitResult",
    "RateTriple",
    "SweepVariable",
    "_FitTargetGeneric",
    "as_fit_target",
    "fit_effective_rates",
    "fit_residual",
    "log_log_slope",
    "norm_ratio_deviation",
    "steady_residual",
    "sweep_fit",
    "with_sweep_value",
]
