"""Implements generic fit target."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import StrEnum, auto
from typing import TYPE_CHECKING

import numpy as np

from modules.effrme import steady_state_three

if TYPE_CHECKING:
    from modules.effrme import PopulationPair, PopulationVector
    from modules.typing import ComplexArray, FloatArray

type RateTriple = tuple[float, float, float]


class FitObjective(StrEnum):
    TRANSIENT = auto()
    """‖ρ_tar(t) − ρ_tar(0)‖_F after evolving from the effRME steady state tensored with thermal machines."""
    STEADY_STATE = auto()
    """‖ρ_tar,ss − ρ_effRME‖_F between the model's reduced steady state and the closed form."""


@dataclass(frozen=True, kw_only=True)
class _FitTargetGeneric(ABC):
    """Generic abstract ground truth the effective qutrit rates (q_A, q_B, q_C) are fitted against.

    A target exposes the virtual-qubit populations of the channels on (0,1), (0,2), (1,2) and the linear
    map taking initial target populations to the reduced target state at a given horizon.
    """

    _transfers: dict[float, ComplexArray] = field(init=False, default_factory=dict, repr=False, compare=False)

    @abstractmethod
    def pair_populations(self) -> tuple[PopulationPair, PopulationPair, PopulationPair]:
        """(τ^g, τ^e) of the channels A, B, C."""

    @abstractmethod
    def initial_guess(self) -> RateTriple:
        """Seed for the optimiser."""

    @property
    @abstractmethod
    def default_objective(self) -> FitObjective: ...

    @abstractmethod
    def _level_transfer(self, horizon: float) -> ComplexArray:
        """Reduced target states at `horizon`, one per initial target level, shape (3, 3, 3)."""

    @abstractmethod
    def steady_target(self) -> ComplexArray:
        """Reduced target steady state, 3 × 3."""

    def norms(self) -> FloatArray | None:
        """Norms of the virtual qubits behind A, B, C, when machines are modelled explicitly."""
        return None

    def transfer(self, horizon: float) -> ComplexArray:
        """Cached `_level_transfer`; the identity embedding at horizon 0."""
        if horizon < 0:
            raise ValueError(f"horizon must be non-negative, got {horizon}")

        if horizon not in self._transfers:
            if horizon == 0:
                levels = np.zeros((3, 3, 3), dtype=np.complex128)
                for j in range(3):
                    levels[j, j, j] = 1.0
                self._transfers[horizon] = levels
            else:
                self._transfers[horizon] = self._level_transfer(horizon)

        return self._transfers[horizon]

    def effrme_state(self, rates: RateTriple) -> PopulationVector:
        return steady_state_three(*rates, *self.pair_populations())

    def evolved_target(self, probs: FloatArray, horizon: float) -> ComplexArray:
        """Reduced target state at `horizon` starting from populations `probs` (machines thermal)."""
        return np.tensordot(probs, self.transfer(horizon), axes=1)
