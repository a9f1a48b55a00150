"""Declarative experiment configuration read from TOML files."""

from __future__ import annotations

import tomllib
from pathlib import Path
from typing import TYPE_CHECKING, Annotated, Any, Literal, Self

from pydantic import AfterValidator, BaseModel, Field, ValidationError

from modules.data import (
    DEFAULT_HORIZON,
    MAX_DIMENSION,
    MAX_EVALUATIONS,
    SIMPLEX_TOLERANCE,
)
from modules.dynamics import CompositeModel, Environment, Integrator, RateSemantics
from modules.effrme import EffRmeSpec, ResetChannel
from modules.laser import LaserConfig
from modules.ratefit import FitObjective, SweepVariable
from modules.virtual_qubit import TwoQubitMachine

if TYPE_CHECKING:
    from collections.abc import Mapping

    from pydantic_core import ErrorDetails

type ExperimentName = Literal["virtual-temp", "steady-state", "evolve", "fit-rates", "sweep-fit", "laser-sweep"]


class ConfigError(ValueError):
    """An experiment file that cannot be read or does not validate."""


class _Section(BaseModel, frozen=True, extra="forbid"):
    @classmethod
    def _from_mapping(cls, mapping: Mapping[str, Any]) -> Self:
        return cls.model_validate(mapping, strict=True, extra="forbid")


def _pair(value: list[int]) -> list[int]:
    if len(value) != 2:
        raise ValueError(f"a level pair has two entries, got {value}")

    return value


LevelPair = Annotated[list[int], AfterValidator(_pair)]


class MachineSection(_Section, frozen=True):
    """One machine; bath temperatures and rates default to the model-wide values (rates to 0 without
    them), Ω₂ to Ω₁ minus the gap of its target pair.
    """

    omega1: float
    coupling: float
    target_pair: LevelPair
    omega2: float | None = None
    temp1: float | None = None
    temp2: float | None = None
    rate1: float | None = None
    rate2: float | None = None


class EnvironmentSection(_Section, frozen=True):
    pair: LevelPair = Field(default_factory=lambda: [0, 1])
    rate: float
    temperature: float


class ModelSection(_Section, frozen=True):
    """Composite target + machines."""

    energies: list[float]
    machines: list[MachineSection]
    rate_semantics: Literal["reset", "gkls"] = "reset"
    t_hot: float | None = None
    t_cold: float | None = None
    rate1: float | None = None
    rate2: float | None = None
    env: EnvironmentSection | None = None
    max_dimension: int = MAX_DIMENSION

    def machine(self, section: MachineSection) -> TwoQubitMachine:
        low, high = section.target_pair
        gap = self.energies[high] - self.energies[low]
        resolved = {
            "omega2": section.omega2 if section.omega2 is not None else section.omega1 - gap,
            "temp1": section.temp1 if section.temp1 is not None else self.t_hot,
            "temp2": section.temp2 if section.temp2 is not None else self.t_cold,
            "rate1": section.rate1 if section.rate1 is not None else self.rate1 or 0.0,
            "rate2": section.rate2 if section.rate2 is not None else self.rate2 or 0.0,
        }
        missing = [name for name, value in resolved.items() if value is None]
        if missing:
            raise ConfigError(f"missing field: {missing[0]} (machine on {tuple(section.target_pair)})")

        return TwoQubitMachine(
            omega1=section.omega1,
            coupling=section.coupling,
            target_pair=(low, high),
            **resolved,
        )

    def build(self) -> CompositeModel:
        env = None
        if self.env is not None:
            low, high = self.env.pair
            env = Environment(pair=(low, high), rate=self.env.rate, temperature=self.env.temperature)

        return CompositeModel(
            target_energies=tuple(self.energies),
            machines=tuple(self.machine(m) for m in self.machines),
            env=env,
            rate_semantics=RateSemantics(self.rate_semantics),
            max_dimension=self.max_dimension,
        )


class ChannelSection(_Section, frozen=True):
    """A reset channel given either by its populations or by a temperature."""

    pair: LevelPair
    rate: float
    pop_lower: float | None = None
    pop_upper: float | None = None
    temperature: float | None = None

    def build(self, energies: list[float]) -> ResetChannel:
        low, high = self.pair
        if self.temperature is not None:
            return ResetChannel.thermal(
                (low, high),
                rate=self.rate,
                gap=energies[high] - energies[low],
                temperature=self.temperature,
            )

        if self.pop_lower is None or self.pop_upper is None:
            raise ConfigError(f"missing field: pop_lower/pop_upper or temperature (channel on {(low, high)})")

        return ResetChannel(pair=(low, high), rate=self.rate, pop_lower=self.pop_lower, pop_upper=self.pop_upper)


class EffRmeSection(_Section, frozen=True):
    energies: list[float]
    channels: list[ChannelSection]

    def build(self) -> EffRmeSpec:
        return EffRmeSpec(
            n=len(self.energies),
            energies=tuple(self.energies),
            channels=tuple(c.build(self.energies) for c in self.channels),
        )


class LaserSection(_Section, frozen=True):
    energies: list[float] = Field(default_factory=lambda: [0.0, 2.0, 3.0])
    omega_b1: float
    omega_c1: float
    t_hot: float
    t_cold: float
    t_env: float
    q_env: float
    q_hot: float
    q_cold: float
    lossless: bool = False

    def build(self) -> LaserConfig:
        w0, w1, w2 = self.energies
        return LaserConfig(**(self.model_dump() | {"energies": (w0, w1, w2)}))


class FitSection(_Section, frozen=True):
    horizon: float = DEFAULT_HORIZON
    objective: Literal["transient", "steady_state"] | None = None
    max_evaluations: int = MAX_EVALUATIONS
    xatol: float = SIMPLEX_TOLERANCE

    @property
    def fit_objective(self) -> FitObjective | None:
        return None if self.objective is None else FitObjective(self.objective)


class EvolveSection(_Section, frozen=True):
    times: list[float]
    initial_populations: list[float]
    integrator: Literal["RK45", "DOP853", "expm"] = "RK45"

    @property
    def method(self) -> Integrator:
        return Integrator(self.integrator)


class SweepSection(_Section, frozen=True):
    variable: Literal["g_A", "g_B", "g_C", "T_h"]
    values: list[float] = Field(min_length=1)

    @property
    def sweep_variable(self) -> SweepVariable:
        return SweepVariable(self.variable)


class ExperimentConfig(_Section, frozen=True):
    """One experiment: what to run, on which system, and where to write it."""

    experiment: ExperimentName
    output: str | None = None
    model: ModelSection | None = None
    effrme: EffRmeSection | None = None
    laser: LaserSection | None = None
    fit: FitSection = Field(default_factory=FitSection)
    evolve: EvolveSection | None = None
    sweep: SweepSection | None = None

    @classmethod
    def from_data(cls, mapping: Mapping[str, Any]) -> Self:
        """Validates a parsed TOML document.

        :raise ConfigError: Naming the first offending field.
        """
        try:
            return cls._from_mapping(mapping)
        except ValidationError as error:
            raise ConfigError(error_message(error)) from error

    def require[S: BaseModel](self, name: str, section: S | None) -> S:
        if section is None:
            raise ConfigError(f"missing field: {name}")

        return section


def _location(error: ErrorDetails) -> str:
    return ".".join(str(part) for part in error["loc"])


def error_message(error: ValidationError) -> str:
    """First validation error as `missing field: ...`, `unknown field: ...` or `invalid field ...: ...`."""
    first = error.errors()[0]
    if first["type"] == "missing":
        return f"missing field: {first['loc'][-1]}"

    if first["type"] == "extra_forbidden":
        return f"unknown field: {_location(first)}"

    return f"invalid field {_location(first) or error.title}: {first['msg']}"


def load_config(path: Path | str) -> ExperimentConfig:
    """Reads and validates an experiment file."""
    try:
        with Path(path).open("rb") as f:
            mapping = tomllib.load(f)
    except OSError as error:
        raise ConfigError(f"cannot read config {path}: {error}") from error
    except tomllib.TOMLDecodeError as error:
        raise ConfigError(f"malformed config {path}: {error}") from error

    return ExperimentConfig.from_data(mapping)
