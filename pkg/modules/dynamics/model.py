"""Implements the composite target + machines model."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum, auto
from functools import reduce
from typing import TYPE_CHECKING, Any, Self

import numpy as np
from pydantic import BaseModel, model_validator

from modules.data import ENERGY_TOLERANCE, MAX_DIMENSION
from modules.operator_core import DensityMatrix, HilbertLayout, thermal_populations
from modules.typing import ensure_pair

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from modules.typing import FloatArray, Pair
    from modules.virtual_qubit import TwoQubitMachine


class RateSemantics(StrEnum):
    """Whether machine rates are reset rates Q (reset) or Lindblad rates Γ (gkls)."""

    RESET = auto()
    GKLS = auto()


class Environment(BaseModel, frozen=True):
    """Bath acting directly on a target transition."""

    pair: tuple[int, int] = (0, 1)
    rate: float
    temperature: float

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.rate < 0:
            raise ValueError(f"negative environment rate {self.rate}")

        if not self.temperature > 0:
            raise ValueError(f"environment temperature must be positive, got {self.temperature}")

        return self


class EnergyConservationError(ValueError):
    """A machine's gap Ω₁ − Ω₂ differs from the gap of the target pair it drives."""


@dataclass(frozen=True, kw_only=True)
class CompositeModel:
    """Target with machines attached to level pairs, plus an optional environment.

    Subsystems are ordered [target, machine 0 qubit 1, machine 0 qubit 2, machine 1 qubit 1, ...].

    :param target_energies: ω₀ … ω_{n−1}.
    :param machines: Machines in declaration order.
    :param env: Optional environment on a target pair.
    :param rate_semantics: Meaning of the machine and environment rates.
    :param max_dimension: Dense-matrix cap for the composite space.
    """

    target_energies: tuple[float, ...]
    machines: tuple[TwoQubitMachine, ...]
    env: Environment | None = None
    rate_semantics: RateSemantics = RateSemantics.RESET
    max_dimension: int = MAX_DIMENSION
    layout: HilbertLayout = field(init=False)

    def __post_init__(self) -> None:
        n = len(self.target_energies)
        if n < 2:
            raise ValueError(f"a target needs at least two levels, got {n}")

        for m in self.machines:
            check_energy_conservation(self.target_energies, m)

        if self.env is not None:
            ensure_pair(self.env.pair, n)

        layout = HilbertLayout(dims=(n, *(2,) * (2 * len(self.machines))), max_dimension=self.max_dimension)
        object.__setattr__(self, "layout", layout)

    @property
    def n_levels(self) -> int:
        return len(self.target_energies)

    def gap(self, pair: Pair) -> float:
        low, high = pair
        return self.target_energies[high] - self.target_energies[low]

    def qubit_indices(self, machine_index: int) -> tuple[int, int]:
        """Subsystem indices of the two qubits of machine `machine_index`."""
        return 1 + 2 * machine_index, 2 + 2 * machine_index

    def machine_for(self, pair: Pair) -> TwoQubitMachine:
        """The machine driving `pair`; every role A/B/C is looked up this way."""
        found = [m for m in self.machines if m.target_pair == tuple(pair)]
        if len(found) != 1:
            raise ValueError(f"expected exactly one machine on pair {pair}, found {len(found)}")

        return found[0]

    def replace(self, **changes: Any) -> CompositeModel:  # noqa: ANN401
        fields = {
            "target_energies": self.target_energies,
            "machines": self.machines,
            "env": self.env,
            "rate_semantics": self.rate_semantics,
            "max_dimension": self.max_dimension,
        }
        return CompositeModel(**(fields | changes))

    def with_machines(self, machines: Iterable[TwoQubitMachine]) -> CompositeModel:
        return self.replace(machines=tuple(machines))

    def machine_populations(self) -> FloatArray:
        """Diagonal of the product of machine-qubit thermal states, in subsystem order."""
        factors = [
            np.array(thermal_populations(omega, temperature))
            for m in self.machines
            for omega, temperature in ((m.omega1, m.temp1), (m.omega2, m.temp2))
        ]
        return reduce(np.kron, factors, np.ones(1))

    def initial_state(self, target_populations: Sequence[float] | FloatArray) -> DensityMatrix:
        """Diagonal target state tensored with every machine qubit in its bath thermal state."""
        probs = np.asarray(target_populations, dtype=np.float64)
        if probs.shape != (self.n_levels,):
            raise ValueError(f"expected {self.n_levels} target populations, got {probs.shape}")

        diagonal = np.kron(probs, self.machine_populations())
        return DensityMatrix.from_matrix(np.diag(diagonal).astype(np.complex128), self.layout)


def check_energy_conservation(energies: Sequence[float], m: TwoQubitMachine) -> None:
    """Ω₁ − Ω₂ must equal ω_l − ω_k for the machine's pair (k, l).

    :raise EnergyConservationError: On a mismatch beyond the energy tolerance.
    """
    ensure_pair(m.target_pair, len(energies))
    low, high = m.target_pair
    target_gap = energies[high] - energies[low]
    if target_gap <= 0 or abs(m.gap - target_gap) > ENERGY_TOLERANCE:
        raise EnergyConservationError(
            f"energy conservation violated: machine gap {m.gap:.12g} vs target gap {target_gap:.12g} "
            f"on {m.target_pair}",
        )
