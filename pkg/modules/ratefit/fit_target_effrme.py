"""Implements fit target for an effRME acting as its own ground truth."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, override

import numpy as np
from scipy import linalg

from modules.data import FIT_PAIRS
from modules.effrme import EffRmeSpec, build_generator_matrix, steady_state_cramer

from .fit_target_generic import FitObjective, RateTriple, _FitTargetGeneric

if TYPE_CHECKING:
    from modules.effrme import PopulationPair, ResetChannel
    from modules.typing import ComplexArray


@dataclass(frozen=True, kw_only=True)
class EffRmeFitTarget(_FitTargetGeneric):
    """Qutrit effRME with exactly one channel on each of (0,1), (0,2), (1,2)."""

    spec: EffRmeSpec

    def __post_init__(self) -> None:
        if self.spec.n != 3:
            raise ValueError(f"rate fits need a qutrit target, got {self.spec.n} levels")

        pairs = sorted(c.pair for c in self.spec.channels)
        if pairs != sorted(FIT_PAIRS):
            raise ValueError(f"expected one channel per pair {FIT_PAIRS}, got {pairs}")

    def _channel(self, pair: tuple[int, int]) -> ResetChannel:
        return next(c for c in self.spec.channels if c.pair == pair)

    @property
    def true_rates(self) -> RateTriple:
        qa, qb, qc = (self._channel(pair).rate for pair in FIT_PAIRS)
        return qa, qb, qc

    @override
    def pair_populations(self) -> tuple[PopulationPair, PopulationPair, PopulationPair]:
        a, b, c = (self._channel(pair).populations for pair in FIT_PAIRS)
        return a, b, c

    @override
    def initial_guess(self) -> RateTriple:
        """Equal rates at the geometric mean of the true ones."""
        mean = math.prod(self.true_rates) ** (1 / 3)
        return mean, mean, mean

    @property
    @override
    def default_objective(self) -> FitObjective:
        return FitObjective.TRANSIENT

    @override
    def _level_transfer(self, horizon: float) -> ComplexArray:
        step = linalg.expm(build_generator_matrix(self.spec) * horizon)
        levels = np.zeros((3, 3, 3), dtype=np.complex128)
        for j in range(3):
            levels[j] = np.diag(step[:, j])

        return levels

    @override
    def steady_target(self) -> ComplexArray:
        return np.diag(steady_state_cramer(self.spec).probs).astype(np.complex128)
