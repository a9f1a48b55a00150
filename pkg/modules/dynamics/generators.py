"""Assembles the RME and GKLS generators of a composite model."""

from __future__ import annotations

from typing import TYPE_CHECKING

from loguru import logger

from modules.operator_core import HilbertLayout, thermal_populations

from .dissipator_gkls import GklsDissipator, PairGklsDissipator
from .dissipator_reset import PairResetDissipator, ResetDissipator
from .hamiltonian import build_hamiltonian, free_energies
from .model import CompositeModel, RateSemantics
from .superoperator import Superoperator, commutator_term, energy_support

if TYPE_CHECKING:
    from modules.effrme import EffRmeSpec

    from .dissipator_generic import _DissipatorGeneric


def model_dissipators(model: CompositeModel) -> list[_DissipatorGeneric]:
    """One dissipator per machine qubit, plus the environment on its target pair."""
    layout = model.layout
    dissipators: list[_DissipatorGeneric] = []
    for index, m in enumerate(model.machines):
        qubits = zip(model.qubit_indices(index), (m.omega1, m.omega2), (m.temp1, m.temp2), (m.rate1, m.rate2))
        for qubit, omega, temperature, rate in qubits:
            if model.rate_semantics is RateSemantics.RESET:
                dissipators.append(
                    ResetDissipator(
                        layout=layout,
                        index=qubit,
                        rate=rate,
                        populations=thermal_populations(omega, temperature),
                    ),
                )
            else:
                dissipators.append(
                    GklsDissipator(layout=layout, index=qubit, rate=rate, omega=omega, temperature=temperature),
                )

    env = model.env
    if env is not None and env.rate > 0:
        gap = model.gap(env.pair)
        if model.rate_semantics is RateSemantics.RESET:
            dissipators.append(
                PairResetDissipator(
                    layout=layout,
                    index=0,
                    rate=env.rate,
                    pair=env.pair,
                    populations=thermal_populations(gap, env.temperature),
                ),
            )
        else:
            dissipators.append(
                PairGklsDissipator(
                    layout=layout,
                    index=0,
                    rate=env.rate,
                    pair=env.pair,
                    omega=gap,
                    temperature=env.temperature,
                ),
            )

    return dissipators


def _assemble(model: CompositeModel, *, full: bool) -> Superoperator:
    total = commutator_term(build_hamiltonian(model).matrix)
    for dissipator in model_dissipators(model):
        total = total + dissipator.generator()

    support = None if full else energy_support(free_energies(model))
    generator = Superoperator.from_sparse(total.tocsr(), model.layout, support=support)
    logger.info(
        f"{model.rate_semantics} generator: Hilbert dimension {model.layout.dimension}, "
        f"operator space {generator.dimension}",
    )
    return generator


def rme_generator(model: CompositeModel, *, full: bool = False) -> Superoperator:
    """L(ρ) = −i[H, ρ] + Σ_i Q_i (τ_i ⊗ Tr_i[ρ] − ρ), one reset per machine qubit.

    :param model: Model with reset semantics.
    :param full: Keep the whole operator space instead of the equal-energy support.
    :return: Trace-preserving generator.
    """
    if model.rate_semantics is not RateSemantics.RESET:
        raise ValueError(f"rme_generator needs reset semantics, got {model.rate_semantics}")

    return _assemble(model, full=full)


def gkls_generator(model: CompositeModel, *, full: bool = False) -> Superoperator:
    """L(ρ) = −i[H, ρ] + Σ_i Γ_i(n̄_i+1) D[σ⁻_i] + Γ_i n̄_i D[σ⁺_i].

    :param model: Model with GKLS semantics.
    :param full: Keep the whole operator space instead of the equal-energy support.
    :return: Trace-preserving generator.
    """
    if model.rate_semantics is not RateSemantics.GKLS:
        raise ValueError(f"gkls_generator needs gkls semantics, got {model.rate_semantics}")

    return _assemble(model, full=full)


def model_generator(model: CompositeModel, *, full: bool = False) -> Superoperator:
    if model.rate_semantics is RateSemantics.RESET:
        return rme_generator(model, full=full)

    return gkls_generator(model, full=full)


def effrme_generator(spec: EffRmeSpec) -> Superoperator:
    """The effRME as a generator on the n-level target alone, one pair reset per channel."""
    layout = HilbertLayout(dims=(spec.n,))
    total = None
    for channel in spec.channels:
        term = PairResetDissipator(
            layout=layout,
            index=0,
            rate=channel.rate,
            pair=channel.pair,
            populations=channel.populations,
        ).generator()
        total = term if total is None else total + term

    if total is None:
        raise ValueError("an effRME generator needs at least one channel")

    return Superoperator.from_sparse(total.tocsr(), layout)
