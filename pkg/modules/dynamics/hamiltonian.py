"""Hamiltonian of the composite model and the operators it conserves."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from modules.operator_core import Operator, embed_many, ket_bra, sigma_minus, sigma_plus

if TYPE_CHECKING:
    from modules.typing import FloatArray

    from .model import CompositeModel


def free_energies(model: CompositeModel) -> FloatArray:
    """Diagonal of H₀ = Σ ω_k|k⟩⟨k| + Σ Ω σ⁺σ⁻ over the composite basis."""
    layout = model.layout
    energies = np.asarray(model.target_energies, dtype=np.float64)[layout.digits(0)]
    for index, m in enumerate(model.machines):
        first, second = model.qubit_indices(index)
        energies = energies + m.omega1 * layout.digits(first) + m.omega2 * layout.digits(second)

    return energies


def free_hamiltonian(model: CompositeModel) -> Operator:
    return Operator(matrix=np.diag(free_energies(model)).astype(np.complex128), layout=model.layout)


def interaction_hamiltonian(model: CompositeModel) -> Operator:
    """Σ g (|k⟩⟨l| ⊗ σ⁺₁σ⁻₂ + h.c.), each machine on its own target pair."""
    layout = model.layout
    matrix = np.zeros((layout.dimension, layout.dimension), dtype=np.complex128)
    for index, m in enumerate(model.machines):
        if m.coupling == 0:
            continue

        low, high = m.target_pair
        first, second = model.qubit_indices(index)
        swap = embed_many({0: ket_bra(model.n_levels, low, high), first: sigma_plus(), second: sigma_minus()}, layout)
        matrix += m.coupling * (swap.matrix + swap.matrix.conj().T)

    return Operator(matrix=matrix, layout=layout)


def build_hamiltonian(model: CompositeModel) -> Operator:
    """H = H₀ + H_int.

    Energy conservation of every flip-flop term is checked when the model is assembled.

    :param model: Composite model.
    :return: Hermitian operator on the model layout.
    """
    return free_hamiltonian(model) + interaction_hamiltonian(model)


def excitation_operator(model: CompositeModel) -> Operator:
    """N = target level index + Σ (l − k) n₁ over machines on (k, l); commutes with H."""
    layout = model.layout
    counts = layout.digits(0).astype(np.float64)
    for index, m in enumerate(model.machines):
        low, high = m.target_pair
        first, _ = model.qubit_indices(index)
        counts = counts + (high - low) * layout.digits(first)

    return Operator(matrix=np.diag(counts).astype(np.complex128), layout=layout)
