"""Runs configured experiments and writes their CSV tables and run summaries."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from enum import StrEnum
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import ValidationError

from modules import data
from modules.config import ConfigError, error_message
from modules.data import CSV_FLOAT_FORMAT, CSV_LINE_TERMINATOR, FIT_PAIRS
from modules.dynamics import CompositeModel, evolve, model_generator, steady_state_nullspace
from modules.effrme import (
    EffRmeSpec,
    PopulationVector,
    rate_ratios_from_populations,
    steady_state_cofactor,
    steady_state_cramer,
    steady_state_four,
    steady_state_three,
    two_channel_qubit_steady,
)
from modules.laser import CURVES, curve_crossings, inversion_sweep, inversion_threshold, lasing_thresholds
from modules.operator_core import DensityMatrix, partial_trace, thermal_populations, trace_distance
from modules.ratefit import (
    CompositeFitTarget,
    EffRmeFitTarget,
    FitProblem,
    SweepVariable,
    fit_effective_rates,
    sweep_fit,
    with_sweep_value,
)
from modules.virtual_qubit import effective_rate_qvir, virtual_qubit_of

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from modules.config import ExperimentConfig
    from modules.ratefit import _FitTargetGeneric

type Notes = dict[str, object]


class Experiment(StrEnum):
    VIRTUAL_TEMP = "virtual-temp"
    STEADY_STATE = "steady-state"
    EVOLVE = "evolve"
    FIT_RATES = "fit-rates"
    SWEEP_FIT = "sweep-fit"
    LASER_SWEEP = "laser-sweep"


def _population_columns(n: int, prefix: str = "p") -> list[str]:
    return [f"{prefix}{j}" for j in range(n)]


def _population_row(probs: Sequence[float] | np.ndarray, prefix: str = "p") -> dict[str, object]:
    return {f"{prefix}{j}": float(p) for j, p in enumerate(probs)}


def _sweep_points(cfg: ExperimentConfig) -> list[float | None]:
    return [None] if cfg.sweep is None else list(cfg.sweep.values)


def _point_model(cfg: ExperimentConfig, model: CompositeModel, value: float | None) -> CompositeModel:
    if cfg.sweep is None or value is None:
        return model

    return with_sweep_value(model, cfg.sweep.sweep_variable, value)


def _guarded(label: str, row: dict[str, object], compute: Callable[[], dict[str, object]]) -> dict[str, object]:
    """`row` completed by `compute()`, or carrying the failure in its `error` column."""
    try:
        return row | compute() | {"error": ""}
    except (ValueError, RuntimeError) as error:
        logger.warning(f"{label} failed: {error}")
        return row | {"error": str(error)}


def _failed_points(rows: Sequence[dict[str, object]]) -> int:
    return sum(1 for row in rows if row.get("error"))


def _with_sweep_column(cfg: ExperimentConfig, rows: list[dict[str, object]], columns: list[str]) -> pd.DataFrame:
    if cfg.sweep is None:
        for row in rows:
            row.pop("value", None)
        return pd.DataFrame(rows, columns=columns)

    name = cfg.sweep.variable
    for row in rows:
        row[name] = row.pop("value")
    return pd.DataFrame(rows, columns=[name, *columns])


def effrme_prediction(model: CompositeModel) -> PopulationVector | None:
    """Target populations predicted by the effRME with rates q_vir.

    Covers a qubit target with one machine (plus environment) and a qutrit target with machines on
    (0,1), (0,2), (1,2); `None` for anything else.
    """
    if model.n_levels == 2 and len(model.machines) == 1:
        m = model.machines[0]
        env = model.env
        q_env, tau_env = 0.0, (1.0, 0.0)
        if env is not None:
            q_env, tau_env = env.rate, thermal_populations(model.gap(env.pair), env.temperature)

        return two_channel_qubit_steady(q_env, tau_env, effective_rate_qvir(m), virtual_qubit_of(m).populations)

    pairs = sorted(m.target_pair for m in model.machines)
    if model.n_levels == 3 and model.env is None and pairs == sorted(FIT_PAIRS):
        target = CompositeFitTarget(model=model)
        return target.effrme_state(target.initial_guess())

    return None


def _machine_rows(value: float | None, model: CompositeModel) -> list[dict[str, object]]:
    rows: list[dict[str, object]] = []
    for m in model.machines:
        vq = virtual_qubit_of(m)
        q_vir = effective_rate_qvir(m) if m.rate1 + m.rate2 > 0 else np.nan
        rows.append(
            {
                "value": value,
                "pair": f"{m.target_pair[0]}-{m.target_pair[1]}",
                "omega1": m.omega1,
                "omega2": m.omega2,
                "temp1": m.temp1,
                "temp2": m.temp2,
                "T_v": vq.vtemp,
                "pop_ground": vq.pop_ground,
                "pop_excited": vq.pop_excited,
                "norm": vq.norm,
                "q_vir": q_vir,
                "error": "",
            },
        )

    return rows


def _virtual_temp(cfg: ExperimentConfig, jobs: int) -> tuple[pd.DataFrame, Notes]:  # noqa: ARG001
    model = cfg.require("model", cfg.model).build()
    rows: list[dict[str, object]] = []
    for value in _sweep_points(cfg):
        try:
            rows.extend(_machine_rows(value, _point_model(cfg, model, value)))
        except (ValueError, RuntimeError) as error:
            logger.warning(f"virtual temperatures at {value} failed: {error}")
            rows.append({"value": value, "error": str(error)})

    columns = ["pair", "omega1", "omega2", "temp1", "temp2", "T_v", "pop_ground", "pop_excited", "norm", "q_vir"]
    return _with_sweep_column(cfg, rows, [*columns, "error"]), {"failed_points": _failed_points(rows)}


def _effrme_steady_rows(spec: EffRmeSpec) -> list[tuple[str, PopulationVector]]:
    rows = [("cramer", steady_state_cramer(spec))]
    if spec.n <= data.COFACTOR_MAX_LEVELS:
        rows.append(("cofactor", steady_state_cofactor(spec)))

    pairs = [c.pair for c in spec.channels]
    if len(set(pairs)) == len(pairs):
        rates = {c.pair: c.rate for c in spec.channels}
        pops = {c.pair: c.populations for c in spec.channels}
        if spec.n == 3 and set(pairs) <= set(FIT_PAIRS):
            a, b, c = FIT_PAIRS
            closed = steady_state_three(
                rates.get(a, 0.0),
                rates.get(b, 0.0),
                rates.get(c, 0.0),
                pops.get(a, (1.0, 0.0)),
                pops.get(b, (1.0, 0.0)),
                pops.get(c, (1.0, 0.0)),
            )
            rows.append(("closed_form", closed))
        elif spec.n == 4:
            rows.append(("closed_form", steady_state_four(rates, pops)))

    return rows


def _steady_state(cfg: ExperimentConfig, jobs: int) -> tuple[pd.DataFrame, Notes]:
    if cfg.effrme is not None:
        spec = cfg.effrme.build()
        rows = [{"method": method, **_population_row(probs.probs)} for method, probs in _effrme_steady_rows(spec)]
        return pd.DataFrame(rows, columns=["method", *_population_columns(spec.n)]), {"levels": spec.n}

    model = cfg.require("model", cfg.model).build()
    n = model.n_levels
    columns = [*_population_columns(n), *_population_columns(n, "effrme_p"), "trace_distance", "error"]

    def compute(value: float | None) -> dict[str, object]:
        point_model = _point_model(cfg, model, value)
        rho = partial_trace(steady_state_nullspace(model_generator(point_model)), [0])
        row = _population_row(rho.populations())
        predicted = effrme_prediction(point_model)
        if predicted is not None:
            row |= _population_row(predicted.probs, "effrme_p")
            row["trace_distance"] = trace_distance(rho, DensityMatrix.diagonal(predicted.probs))

        return row

    def point(value: float | None) -> dict[str, object]:
        return _guarded(f"steady state at {value}", {"value": value}, lambda: compute(value))

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        futures = [executor.submit(point, value) for value in _sweep_points(cfg)]
        rows = [future.result() for future in futures]

    notes: Notes = {"hilbert_dimension": model.layout.dimension, "failed_points": _failed_points(rows)}
    return _with_sweep_column(cfg, rows, columns), notes


def _evolve(cfg: ExperimentConfig, jobs: int) -> tuple[pd.DataFrame, Notes]:
    model = cfg.require("model", cfg.model).build()
    section = cfg.require("evolve", cfg.evolve)
    gen = model_generator(model)
    rho0 = model.initial_state(section.initial_populations)
    n = model.n_levels

    def compute(t: float) -> dict[str, object]:
        rho_t = partial_trace(evolve(gen, rho0, t=t, integrator=section.method), [0])
        return {**_population_row(rho_t.populations()), "purity": rho_t.purity()}

    def point(t: float) -> dict[str, object]:
        return _guarded(f"evolution to t = {t}", {"t": t}, lambda: compute(t))

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        futures = [executor.submit(point, t) for t in section.times]
        rows = [future.result() for future in futures]

    notes: Notes = {"integrator": section.integrator, "failed_points": _failed_points(rows)}
    return pd.DataFrame(rows, columns=["t", *_population_columns(n), "purity", "error"]), notes


def _fit_rates(cfg: ExperimentConfig, jobs: int) -> tuple[pd.DataFrame, Notes]:  # noqa: ARG001
    target: _FitTargetGeneric
    if cfg.effrme is not None:
        target = EffRmeFitTarget(spec=cfg.effrme.build())
    else:
        target = CompositeFitTarget(model=cfg.require("model", cfg.model).build())

    problem = FitProblem(
        target=target,
        horizon=cfg.fit.horizon,
        objective=cfg.fit.fit_objective,
        max_evaluations=cfg.fit.max_evaluations,
        xatol=cfg.fit.xatol,
    )
    fit = fit_effective_rates(problem)
    row: dict[str, object] = {
        "qA": fit.rates[0],
        "qB": fit.rates[1],
        "qC": fit.rates[2],
        "qA_over_qB": fit.qA_over_qB,
        "qB_over_qC": fit.qB_over_qC,
        "residual": fit.residual,
        "evaluations": fit.evaluations,
        "converged": fit.converged,
        "objective": str(fit.objective),
        "steady_qA_over_qB": np.nan,
        "steady_qB_over_qC": np.nan,
    }
    try:
        steady = PopulationVector.normalised(np.real(np.diag(target.steady_target())))
        row["steady_qA_over_qB"], row["steady_qB_over_qC"] = rate_ratios_from_populations(
            steady,
            *target.pair_populations(),
        )
    except ValueError as error:
        logger.warning(f"steady-state rate ratios unavailable: {error}")

    norms = target.norms()
    notes: Notes = {"initial_guess": problem.guess, "objective": str(problem.resolved_objective)}
    if norms is not None:
        notes["norm_ratios"] = (float(norms[0] / norms[1]), float(norms[1] / norms[2]))

    return pd.DataFrame([row]), notes


def _sweep_fit(cfg: ExperimentConfig, jobs: int) -> tuple[pd.DataFrame, Notes]:
    model = cfg.require("model", cfg.model).build()
    sweep = cfg.require("sweep", cfg.sweep)
    table = sweep_fit(
        model,
        sweep.sweep_variable,
        sweep.values,
        horizon=cfg.fit.horizon,
        objective=cfg.fit.fit_objective,
        jobs=jobs,
    )
    return table, {"failed_points": int((table["error"] != "").sum())}


def _laser_sweep(cfg: ExperimentConfig, jobs: int) -> tuple[pd.DataFrame, Notes]:
    laser = cfg.require("laser", cfg.laser).build()
    sweep = cfg.require("sweep", cfg.sweep)
    if sweep.sweep_variable is not SweepVariable.T_H:
        raise ConfigError(f"invalid field sweep.variable: the laser sweep runs over T_h, got {sweep.variable}")

    table = inversion_sweep(laser, sweep.values, jobs=jobs)
    notes: Notes = {
        "inversion_threshold_T_h": inversion_threshold(laser),
        "lasing_thresholds": lasing_thresholds(table),
        "virtual_lossy_crosses_typical_lossless": curve_crossings(
            table["T_h"],
            table["virtual_lossy"],
            table["typical_lossless"],
        ),
        "curves": CURVES,
    }
    return table, notes


RUNNERS: dict[Experiment, Callable[[ExperimentConfig, int], tuple[pd.DataFrame, Notes]]] = {
    Experiment.VIRTUAL_TEMP: _virtual_temp,
    Experiment.STEADY_STATE: _steady_state,
    Experiment.EVOLVE: _evolve,
    Experiment.FIT_RATES: _fit_rates,
    Experiment.SWEEP_FIT: _sweep_fit,
    Experiment.LASER_SWEEP: _laser_sweep,
}


def write_table(table: pd.DataFrame, path: Path) -> None:
    """RFC-4180 CSV with a header row and twelve significant digits."""
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator=CSV_LINE_TERMINATOR)


def summary_path(path: Path) -> Path:
    return path.with_name(f"{path.name}.summary.txt")


def _tolerances() -> dict[str, object]:
    suffixes = ("TOLERANCE", "LIMIT", "GAP", "RTOL", "ATOL")
    names = [name for name in dir(data) if name.isupper() and name.endswith(suffixes)]
    return {name: getattr(data, name) for name in sorted(names)}


def write_summary(cfg: ExperimentConfig, path: Path, *, wall_time: float, rows: int, notes: Notes) -> Path:
    """Plain-text record of the resolved configuration, numerical tolerances, wall time and findings."""
    lines = [
        f"experiment = {cfg.experiment}",
        f"output = {path}",
        f"rows = {rows}",
        f"wall_time_s = {wall_time:.3f}",
        "",
        "[config]",
        cfg.model_dump_json(indent=2, exclude_none=True),
        "",
        "[tolerances]",
        *(f"{name} = {value}" for name, value in _tolerances().items()),
        "",
        "[results]",
        *(f"{key} = {value}" for key, value in notes.items()),
    ]
    target = summary_path(path)
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return target


def run_experiment(cfg: ExperimentConfig, *, output: Path | str | None = None, jobs: int = 1) -> Path:
    """Runs one experiment and writes `<output>` plus `<output>.summary.txt`.

    :param cfg: Validated configuration.
    :param output: CSV path; defaults to the config's `output`, then to `<experiment>.csv`.
    :param jobs: Worker threads for sweeps.
    :return: Path of the CSV.
    :raise ConfigError: When the configured system itself is invalid.
    """
    path = Path(output or cfg.output or f"{cfg.experiment}.csv")
    experiment = Experiment(cfg.experiment)
    logger.info(f"running {experiment} -> {path}")
    start = time.perf_counter()
    try:
        table, notes = RUNNERS[experiment](cfg, jobs)
    except ValidationError as error:
        raise ConfigError(error_message(error)) from error

    wall_time = time.perf_counter() - start
    write_table(table, path)
    write_summary(cfg, path, wall_time=wall_time, rows=len(table), notes=notes)
    logger.info(f"{experiment} finished in {wall_time:.2f} s, {len(table)} rows")
    return path
