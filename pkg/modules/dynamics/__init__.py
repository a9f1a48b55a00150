"""Dynamics package."""

from .dissipator_generic import _DissipatorGeneric
from .dissipator_gkls import GklsDissipator, PairGklsDissipator, bose_occupation
from .dissipator_reset import PairResetDissipator, ResetDissipator
from .generators import effrme_generator, gkls_generator, model_dissipators, model_generator, rme_generator
from .hamiltonian import build_hamiltonian, excitation_operator, free_energies, free_hamiltonian
from .model import CompositeModel, EnergyConservationError, Environment, RateSemantics, check_energy_conservation
from .solvers import (
    Integrator,
    NonUniqueSteadyStateError,
    StiffSystemError,
    evolve,
    propagator,
    steady_state_nullspace,
)
from .superoperator import Superoperator, energy_support, unvec, vec

__all__ = [
    "CompositeModel",
    "EnergyConservationError",
    "Environment",
    "GklsDissipator",
    "Integrator",
    "NonUniqueSteadyStateError",
    "PairGklsDissipator",
    "PairResetDissipator",
    "RateSemantics",
    "ResetDissipator",
    "StiffSystemError",
    "Superoperator",
    "_DissipatorGeneric",
    "bose_occupation",
    "build_hamiltonian",
    "check_energy_conservation",
    "effrme_generator",
    "energy_support",
    "evolve",
    "excitation_operator",
    "free_energies",
    "free_hamiltonian",
    "gkls_generator",
    "model_dissipators",
    "model_generator",
    "propagator",
    "rme_generator",
    "steady_state_nullspace",
    "unvec",
    "vec",
]
