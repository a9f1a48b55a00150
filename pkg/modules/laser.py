"""Three-level laser pumped through virtual qubits.

The typical laser heats the pump transition (0,2) with a hot bath and cools (1,2) with a cold bath. The
enhanced scheme puts a two-qubit machine on each of them: machine B (qubit 1 hot, qubit 2 cold) on (0,2)
and machine C (qubit 1 cold, qubit 2 hot) on (1,2). Lasing is read off the inversion p₁/p₀ of the lasing
transition (0,1), which may also leak photons to an environment.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from enum import StrEnum, auto
from typing import TYPE_CHECKING, Self

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel, model_validator

from modules.effrme import PopulationVector, steady_state_three
from modules.operator_core import thermal_populations
from modules.virtual_qubit import TwoQubitMachine, virtual_qubit_of, virtual_temperature

if TYPE_CHECKING:
    from collections.abc import Sequence


class Scheme(StrEnum):
    TYPICAL = auto()
    VIRTUAL = auto()


CURVES = ("typical_lossless", "typical_lossy", "virtual_lossless", "virtual_lossy")
"""Inversion curves of a sweep, named scheme_loss."""


class LaserConfig(BaseModel, frozen=True):
    """Laser parameters.

    :param energies: ω₀, ω₁, ω₂.
    :param omega_b1: Ω_{B1}; Ω_{B2} = Ω_{B1} − (ω₂ − ω₀).
    :param omega_c1: Ω_{C1}; Ω_{C2} = Ω_{C1} − (ω₂ − ω₁).
    :param t_hot: Hot bath temperature T_h.
    :param t_cold: Cold bath temperature T_c.
    :param t_env: Temperature of the environment on the lasing transition.
    :param q_env: Environment rate.
    :param q_hot: Q_h, rate of the hot channel (and scale of machine B's effective rate).
    :param q_cold: Q_c, rate of the cold channel (and scale of machine C's effective rate).
    :param lossless: Drop the environment.
    """

    energies: tuple[float, float, float] = (0.0, 2.0, 3.0)
    omega_b1: float
    omega_c1: float
    t_hot: float
    t_cold: float
    t_env: float
    q_env: float
    q_hot: float
    q_cold: float
    lossless: bool = False

    @model_validator(mode="after")
    def _check(self) -> Self:
        w0, w1, w2 = self.energies
        if not w0 < w1 < w2:
            raise ValueError(f"laser levels must be strictly increasing, got {self.energies}")

        if not 0 < self.t_cold <= self.t_hot:
            raise ValueError(f"laser baths need T_h >= T_c > 0, got T_h {self.t_hot}, T_c {self.t_cold}")

        if min(self.q_env, self.q_hot, self.q_cold) < 0 or not self.t_env > 0:
            raise ValueError("laser rates must be non-negative and T_en positive")

        # machine validation enforces Ω_{B2}, Ω_{C2} > 0
        _ = self.machine_b, self.machine_c
        return self

    @property
    def pump_gap(self) -> float:
        return self.energies[2] - self.energies[0]

    @property
    def cold_gap(self) -> float:
        return self.energies[2] - self.energies[1]

    @property
    def lasing_gap(self) -> float:
        return self.energies[1] - self.energies[0]

    @property
    def machine_b(self) -> TwoQubitMachine:
        return TwoQubitMachine.for_gap(
            omega1=self.omega_b1,
            gap=self.pump_gap,
            temp1=self.t_hot,
            temp2=self.t_cold,
            target_pair=(0, 2),
        )

    @property
    def machine_c(self) -> TwoQubitMachine:
        return TwoQubitMachine.for_gap(
            omega1=self.omega_c1,
            gap=self.cold_gap,
            temp1=self.t_cold,
            temp2=self.t_hot,
            target_pair=(1, 2),
        )

    def with_hot(self, t_hot: float) -> LaserConfig:
        return self.model_validate(self.model_dump() | {"t_hot": t_hot})


def laser_virtual_temperatures(cfg: LaserConfig) -> tuple[float, float]:
    """(T_vB, T_vC); T_vB turns negative past the inversion threshold, T_vC stays below T_c."""
    return virtual_temperature(cfg.machine_b), virtual_temperature(cfg.machine_c)


def inversion_threshold(cfg: LaserConfig) -> float:
    """Hot temperature (Ω_{B1}/Ω_{B2}) T_c at which machine B's virtual temperature changes sign."""
    m = cfg.machine_b
    return m.omega1 / m.omega2 * cfg.t_cold


def laser_norms(cfg: LaserConfig) -> tuple[float, float]:
    """(n_B, n_C)."""
    return virtual_qubit_of(cfg.machine_b).norm, virtual_qubit_of(cfg.machine_c).norm


def laser_steady_state(cfg: LaserConfig, scheme: Scheme | str, *, lossless: bool | None = None) -> PopulationVector:
    """Qutrit steady state of either laser.

    The virtual scheme uses the machines' virtual qubits with effective rates q_B = Q_h n_B and
    q_C = Q_c n_C; the typical scheme uses the baths directly at rates Q_h and Q_c.

    :param cfg: Laser parameters.
    :param scheme: Typical or virtual.
    :param lossless: Overrides `cfg.lossless`.
    :return: Populations p₀, p₁, p₂.
    """
    scheme = Scheme(scheme)
    if scheme is Scheme.VIRTUAL:
        vq_b, vq_c = virtual_qubit_of(cfg.machine_b), virtual_qubit_of(cfg.machine_c)
        q_b, tau_b = cfg.q_hot * vq_b.norm, vq_b.populations
        q_c, tau_c = cfg.q_cold * vq_c.norm, vq_c.populations
    else:
        q_b, tau_b = cfg.q_hot, thermal_populations(cfg.pump_gap, cfg.t_hot)
        q_c, tau_c = cfg.q_cold, thermal_populations(cfg.cold_gap, cfg.t_cold)

    drop_env = cfg.lossless if lossless is None else lossless
    q_env = 0.0 if drop_env else cfg.q_env
    tau_env = thermal_populations(cfg.lasing_gap, cfg.t_env)
    return steady_state_three(q_env, q_b, q_c, tau_env, tau_b, tau_c)


def inversion(cfg: LaserConfig, scheme: Scheme | str, *, lossless: bool) -> float:
    """p₁ / p₀."""
    return laser_steady_state(cfg, scheme, lossless=lossless).ratio(1, 0)


SWEEP_COLUMNS = ("T_h", *CURVES, "T_vB", "T_vC", "error")


def inversion_sweep(cfg: LaserConfig, t_hot_values: Sequence[float], *, jobs: int = 1) -> pd.DataFrame:
    """The four inversion curves against T_h.

    :param cfg: Template; only T_h changes.
    :param t_hot_values: Hot temperatures, each ≥ T_c.
    :param jobs: Worker threads.
    :return: Table with columns `SWEEP_COLUMNS`; failing points carry their message in `error`.
    """
    if not t_hot_values:
        raise ValueError("a sweep needs at least one value")

    def point(t_hot: float) -> dict[str, object]:
        row: dict[str, object] = {"T_h": t_hot} | dict.fromkeys(SWEEP_COLUMNS[1:-1], math.nan) | {"error": ""}
        try:
            point_cfg = cfg.with_hot(t_hot)
            for curve in CURVES:
                scheme, loss = curve.split("_")
                row[curve] = inversion(point_cfg, scheme, lossless=loss == "lossless")

            row["T_vB"], row["T_vC"] = laser_virtual_temperatures(point_cfg)
        except ValueError as error:
            logger.warning(f"laser point T_h = {t_hot} failed: {error}")
            row["error"] = str(error)

        return row

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        futures = [executor.submit(point, t_hot) for t_hot in t_hot_values]
        rows = [future.result() for future in futures]

    return pd.DataFrame(rows, columns=list(SWEEP_COLUMNS))


def curve_crossings(x: Sequence[float], y: Sequence[float], level: float | Sequence[float] = 1.0) -> list[float]:
    """Abscissae where y crosses `level` (a constant or a second curve), by linear interpolation.

    :param x: Increasing abscissae.
    :param y: Curve values.
    :param level: Constant or curve to cross.
    :return: Crossing abscissae, in order.
    """
    xs = np.asarray(x, dtype=np.float64)
    diff = np.asarray(y, dtype=np.float64) - np.broadcast_to(np.asarray(level, dtype=np.float64), xs.shape)
    crossings = []
    for i in range(xs.size - 1):
        a, b = diff[i], diff[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)):
            continue

        if a == 0:
            crossings.append(float(xs[i]))
        elif a * b < 0:
            crossings.append(float(xs[i] - a * (xs[i + 1] - xs[i]) / (b - a)))

    if xs.size and diff[-1] == 0:
        crossings.append(float(xs[-1]))

    return crossings


def lasing_thresholds(table: pd.DataFrame) -> dict[str, list[float]]:
    """T_h where each curve crosses the lasing threshold p₁/p₀ = 1."""
    thresholds = {curve: curve_crossings(table["T_h"], table[curve]) for curve in CURVES}
    for curve, found in thresholds.items():
        logger.info(f"{curve}: lasing threshold at T_h = {found or 'none in range'}")

    return thresholds
