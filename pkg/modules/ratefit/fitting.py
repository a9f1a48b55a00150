"""Fits the effective qutrit rates (q_A, q_B, q_C) and sweeps them across model parameters."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import StrEnum
from typing import TYPE_CHECKING, Self

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel
from scipy.optimize import minimize

from modules.data import (
    DEFAULT_HORIZON,
    MAX_EVALUATIONS,
    PAIR_A,
    PAIR_B,
    PAIR_C,
    RESIDUAL_TOLERANCE,
    RESTART_SPREAD,
    SIMPLEX_SPREAD,
    SIMPLEX_TOLERANCE,
)
from modules.dynamics import CompositeModel

from .fit_target_composite import CompositeFitTarget
from .fit_target_generic import FitObjective, RateTriple, _FitTargetGeneric

if TYPE_CHECKING:
    from collections.abc import Sequence

    from modules.typing import FloatArray


class SweepVariable(StrEnum):
    G_A = "g_A"
    G_B = "g_B"
    G_C = "g_C"
    T_H = "T_h"


SWEEP_PAIRS = {SweepVariable.G_A: PAIR_A, SweepVariable.G_B: PAIR_B, SweepVariable.G_C: PAIR_C}


def as_fit_target(model: CompositeModel | _FitTargetGeneric) -> _FitTargetGeneric:
    return CompositeFitTarget(model=model) if isinstance(model, CompositeModel) else model


def fit_residual(
    model: CompositeModel | _FitTargetGeneric,
    rates: Sequence[float],
    horizon: float = DEFAULT_HORIZON,
) -> float:
    """Deviation of the evolved target from the effRME steady state for `rates`.

    The target starts in the closed-form qutrit steady state for `rates`, tensored with thermal machines.

    :param model: Composite model or fit target.
    :param rates: (q_A, q_B, q_C), all > 0.
    :param horizon: Evolution time.
    :return: ‖ρ_tar(t) − ρ_tar(0)‖_F.
    """
    if min(rates) <= 0:
        raise ValueError(f"rates must be positive, got {tuple(rates)}")

    target = as_fit_target(model)
    qa, qb, qc = rates
    probs = target.effrme_state((qa, qb, qc)).probs
    return float(np.linalg.norm(target.evolved_target(probs, horizon) - np.diag(probs)))


def steady_residual(model: CompositeModel | _FitTargetGeneric, rates: Sequence[float]) -> float:
    """‖ρ_tar,ss − diag(effRME steady state)‖_F."""
    if min(rates) <= 0:
        raise ValueError(f"rates must be positive, got {tuple(rates)}")

    target = as_fit_target(model)
    qa, qb, qc = rates
    probs = target.effrme_state((qa, qb, qc)).probs
    return float(np.linalg.norm(target.steady_target() - np.diag(probs)))


@dataclass(frozen=True, kw_only=True)
class FitProblem:
    """One effective-rate fit.

    :param target: Ground truth.
    :param horizon: Evolution time of the transient residual.
    :param initial_guess: Seed; defaults to the target's own guess. Its geometric mean fixes the rate scale.
    :param objective: Residual minimised; defaults to the target's.
    :param max_evaluations: Residual evaluations allowed over both optimiser runs.
    :param xatol: Simplex diameter in log-rate space at which the optimiser stops.
    """

    target: _FitTargetGeneric
    horizon: float = DEFAULT_HORIZON
    initial_guess: RateTriple | None = None
    objective: FitObjective | None = None
    max_evaluations: int = MAX_EVALUATIONS
    xatol: float = SIMPLEX_TOLERANCE
    guess: RateTriple = field(init=False)
    resolved_objective: FitObjective = field(init=False)

    def __post_init__(self) -> None:
        if not self.horizon > 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")

        guess = self.initial_guess or self.target.initial_guess()
        if min(guess) <= 0:
            raise ValueError(f"initial guess must be positive, got {guess}")

        qa, qb, qc = guess
        object.__setattr__(self, "guess", (float(qa), float(qb), float(qc)))
        object.__setattr__(self, "resolved_objective", self.objective or self.target.default_objective)

    @classmethod
    def from_model(
        cls,
        model: CompositeModel,
        *,
        horizon: float = DEFAULT_HORIZON,
        initial_guess: RateTriple | None = None,
        objective: FitObjective | None = None,
    ) -> Self:
        return cls(
            target=CompositeFitTarget(model=model),
            horizon=horizon,
            initial_guess=initial_guess,
            objective=objective,
        )

    def residual(self, rates: Sequence[float]) -> float:
        if self.resolved_objective is FitObjective.STEADY_STATE:
            return steady_residual(self.target, rates)

        return fit_residual(self.target, rates, self.horizon)


class FitResult(BaseModel, frozen=True):
    rates: tuple[float, float, float]
    residual: float
    evaluations: int
    converged: bool
    objective: FitObjective

    @property
    def qA_over_qB(self) -> float:
        return self.rates[0] / self.rates[1]

    @property
    def qB_over_qC(self) -> float:
        return self.rates[1] / self.rates[2]


def _simplex(x0: FloatArray, spread: float) -> FloatArray:
    """x0 plus one vertex per axis, `spread` away."""
    return np.vstack([x0, x0 + spread * np.eye(x0.size)])


def fit_effective_rates(problem: FitProblem) -> FitResult:
    """Nelder–Mead in log-rate space, restarted once from a perturbed simplex around the best point.

    The residuals depend only on rate ratios, so the search moves along the two log-ratio directions with
    the geometric mean of the rates held at that of the initial guess.

    :param problem: Fit problem.
    :return: Best rates found; `converged` is false when the evaluation budget ran out.
    """
    log_guess = np.log(problem.guess)
    center = float(log_guess.mean())

    def rates_of(z: FloatArray) -> RateTriple:
        qa, qb, qc = np.exp(center + np.array([z[0], z[1], -z[0] - z[1]]))
        return float(qa), float(qb), float(qc)

    def objective(z: FloatArray) -> float:
        try:
            value = problem.residual(rates_of(z))
        except ValueError:
            return math.inf

        return value if math.isfinite(value) else math.inf

    start = log_guess[:2] - center
    evaluations = 0
    best_x, best_fun = start, math.inf
    success = False
    for spread in (SIMPLEX_SPREAD, RESTART_SPREAD):
        budget = problem.max_evaluations - evaluations
        if budget <= 0:
            success = False
            break

        result = minimize(
            objective,
            best_x,
            method="Nelder-Mead",
            options={
                "initial_simplex": _simplex(np.asarray(best_x, dtype=np.float64), spread),
                "maxfev": budget,
                "xatol": problem.xatol,
                "fatol": RESIDUAL_TOLERANCE,
            },
        )
        evaluations += int(result.nfev)
        success = bool(result.success)
        if result.fun <= best_fun:
            best_x, best_fun = result.x, float(result.fun)

    fit = FitResult(
        rates=rates_of(best_x),
        residual=best_fun,
        evaluations=evaluations,
        converged=success and math.isfinite(best_fun),
        objective=problem.resolved_objective,
    )
    if fit.converged:
        logger.info(f"converged after {fit.evaluations} evaluations, rates {fit.rates}, residual {fit.residual:.3e}")
    else:
        logger.warning(f"fit stopped unconverged after {fit.evaluations} evaluations, residual {fit.residual:.3e}")

    return fit


def with_sweep_value(model: CompositeModel, variable: SweepVariable, value: float) -> CompositeModel:
    """Model with one dial set: a machine coupling g_X, or the hot-bath temperature of every machine."""
    if variable is SweepVariable.T_H:
        return model.with_machines(m.with_baths(value, m.temp2) for m in model.machines)

    pair = SWEEP_PAIRS[variable]
    return model.with_machines(m.with_coupling(value) if m.target_pair == pair else m for m in model.machines)


SWEEP_COLUMNS = (
    "qA_over_qB",
    "qB_over_qC",
    "residual",
    "qA",
    "qB",
    "qC",
    "nA_over_nB",
    "nB_over_nC",
    "predicted_qA_over_qB",
    "predicted_qB_over_qC",
    "evaluations",
    "converged",
    "error",
)
"""Columns after the dial; `predicted_*` are the ratios of q_vir = 2g²n / (Q₁ + Q₂) per machine."""


def sweep_fit(
    template: CompositeModel,
    variable: SweepVariable | str,
    values: Sequence[float],
    *,
    horizon: float = DEFAULT_HORIZON,
    objective: FitObjective | None = None,
    jobs: int = 1,
) -> pd.DataFrame:
    """One fit per value of a dial, warm-started from the previous optimum.

    Generators, propagators and steady states are prepared concurrently on `jobs` workers; the fits
    themselves run in sequence. A failing point is logged and recorded in the `error` column.

    :param template: Model the dial is applied to.
    :param variable: g_A, g_B, g_C or T_h.
    :param values: Dial values, non-empty.
    :param horizon: Evolution time of the transient residual.
    :param objective: Residual minimised; defaults to the one matching the rate semantics.
    :param jobs: Worker threads.
    :return: Table with the dial first, then `SWEEP_COLUMNS`.
    """
    if not values:
        raise ValueError("a sweep needs at least one value")

    variable = SweepVariable(variable)
    fit_objective = objective or CompositeFitTarget(model=template).default_objective

    def prepare(value: float) -> CompositeFitTarget:
        target = CompositeFitTarget(model=with_sweep_value(template, variable, value))
        if fit_objective is FitObjective.STEADY_STATE:
            target.steady_target()
        else:
            target.transfer(horizon)
        return target

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        futures = [executor.submit(prepare, value) for value in values]

    rows = []
    previous: FitResult | None = None
    for value, future in zip(values, futures):
        logger.info(f"sweep {variable} = {value}")
        row: dict[str, object] = {str(variable): value} | dict.fromkeys(SWEEP_COLUMNS, math.nan)
        row["error"] = ""
        try:
            target = future.result()
            seed = guess = target.initial_guess()
            if previous is not None:
                # keep the scale of this point's own seed, take the ratios from the last optimum
                scale = (math.prod(guess) / math.prod(previous.rates)) ** (1 / 3)
                qa, qb, qc = (q * scale for q in previous.rates)
                guess = (qa, qb, qc)

            fit = fit_effective_rates(
                FitProblem(target=target, horizon=horizon, initial_guess=guess, objective=fit_objective),
            )
        except (ValueError, RuntimeError) as error:
            logger.warning(f"sweep point {variable} = {value} failed: {error}")
            row["error"] = str(error)
            row["converged"] = False
            rows.append(row)
            continue

        norms = target.norms()
        row |= {
            "qA_over_qB": fit.qA_over_qB,
            "qB_over_qC": fit.qB_over_qC,
            "residual": fit.residual,
            "qA": fit.rates[0],
            "qB": fit.rates[1],
            "qC": fit.rates[2],
            "nA_over_nB": norms[0] / norms[1],
            "nB_over_nC": norms[1] / norms[2],
            "predicted_qA_over_qB": seed[0] / seed[1],
            "predicted_qB_over_qC": seed[1] / seed[2],
            "evaluations": fit.evaluations,
            "converged": fit.converged,
        }
        rows.append(row)
        previous = fit

    return pd.DataFrame(rows, columns=[str(variable), *SWEEP_COLUMNS])


def norm_ratio_deviation(table: pd.DataFrame) -> float:
    """How far the fitted rate ratios stray from proportionality to the norm ratios over a sweep.

    Each ratio (q_i/q_j) / (n_i/n_j) is compared with its median over the sweep, which absorbs the fixed
    coupling factor g_i²/g_j².

    :return: Largest relative deviation from the median.
    """
    deviations = []
    for fitted, norms in (("qA_over_qB", "nA_over_nB"), ("qB_over_qC", "nB_over_nC")):
        scaled = (table[fitted] / table[norms]).dropna()
        deviations.append((scaled / scaled.median() - 1).abs())

    return float(pd.concat(deviations).max())


def log_log_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    slope, _ = np.polyfit(np.log(np.asarray(x, dtype=np.float64)), np.log(np.asarray(y, dtype=np.float64)), 1)
    return float(slope)

