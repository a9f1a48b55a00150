"""Implements fit target for a full RME or GKLS composite model."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, override

import numpy as np
from loguru import logger

from modules.data import EVOLVE_POSITIVITY_TOLERANCE, FIT_PAIRS
from modules.dynamics import (
    CompositeModel,
    Integrator,
    RateSemantics,
    evolve,
    model_generator,
    propagator,
    steady_state_nullspace,
)
from modules.operator_core import DensityMatrix, partial_trace
from modules.virtual_qubit import effective_rate_qvir, virtual_qubit_of

from .fit_target_generic import FitObjective, RateTriple, _FitTargetGeneric

if TYPE_CHECKING:
    from modules.dynamics import Superoperator
    from modules.effrme import PopulationPair
    from modules.typing import ComplexArray, FloatArray


@dataclass(frozen=True, kw_only=True)
class CompositeFitTarget(_FitTargetGeneric):
    """Qutrit target driven by the machines A on (0,1), B on (0,2) and C on (1,2).

    :param model: Composite model with three target levels.
    :param integrator: How the transfer to the horizon is computed.
    """

    model: CompositeModel
    integrator: Integrator = Integrator.EXPM

    def __post_init__(self) -> None:
        if self.model.n_levels != 3:
            raise ValueError(f"rate fits need a qutrit target, got {self.model.n_levels} levels")

        for pair in FIT_PAIRS:
            self.model.machine_for(pair)

    @cached_property
    def generator(self) -> Superoperator:
        return model_generator(self.model)

    @override
    def pair_populations(self) -> tuple[PopulationPair, PopulationPair, PopulationPair]:
        a, b, c = (virtual_qubit_of(self.model.machine_for(pair)).populations for pair in FIT_PAIRS)
        return a, b, c

    @override
    def initial_guess(self) -> RateTriple:
        """q_i = 2 g_i² n_i / (rate_i1 + rate_i2) per machine."""
        qa, qb, qc = (effective_rate_qvir(self.model.machine_for(pair)) for pair in FIT_PAIRS)
        if min(qa, qb, qc) <= 0:
            raise ValueError(f"every machine needs a nonzero coupling to seed a fit, got {(qa, qb, qc)}")

        return qa, qb, qc

    @property
    @override
    def default_objective(self) -> FitObjective:
        if self.model.rate_semantics is RateSemantics.RESET:
            return FitObjective.STEADY_STATE

        return FitObjective.TRANSIENT

    @override
    def norms(self) -> FloatArray:
        return np.array([virtual_qubit_of(self.model.machine_for(pair)).norm for pair in FIT_PAIRS])

    @override
    def _level_transfer(self, horizon: float) -> ComplexArray:
        gen = self.generator
        levels = np.zeros((3, 3, 3), dtype=np.complex128)
        step = propagator(gen, horizon) if self.integrator is Integrator.EXPM else None
        for j in range(3):
            rho0 = self.model.initial_state(np.eye(3)[j])
            if step is None:
                rho_t = evolve(gen, rho0, t=horizon, integrator=self.integrator)
            else:
                matrix = gen.expand(step @ gen.restrict(rho0))
                rho_t = DensityMatrix.from_matrix(
                    (matrix + matrix.conj().T) / 2,
                    self.model.layout,
                    positivity_tolerance=EVOLVE_POSITIVITY_TOLERANCE,
                )

            levels[j] = partial_trace(rho_t, [0]).matrix

        logger.debug(f"transfer to t = {horizon} built with {self.integrator}")
        return levels

    @cached_property
    def _steady(self) -> ComplexArray:
        return partial_trace(steady_state_nullspace(self.generator), [0]).matrix

    @override
    def steady_target(self) -> ComplexArray:
        return self._steady
