"""Implements thermal GKLS dissipators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, override

from modules.operator_core import ket_bra, sigma_minus, sigma_plus
from modules.typing import ensure_pair

from .dissipator_generic import _DissipatorGeneric
from .superoperator import lindblad_term

if TYPE_CHECKING:
    from scipy import sparse

    from modules.typing import Pair


def bose_occupation(omega: float, temperature: float) -> float:
    """n̄(ω, T) = 1 / (e^{ω/T} − 1).

    :param omega: Mode frequency, > 0.
    :param temperature: Bath temperature, finite and > 0.
    :return: Mean occupation; tends to 0 as T → 0⁺.
    """
    if omega <= 0:
        raise ValueError(f"bosonic occupation undefined for frequency {omega}")

    if not (temperature > 0 and math.isfinite(temperature)):
        raise ValueError(f"bosonic occupation undefined for temperature {temperature}")

    x = omega / temperature
    return math.exp(-x) / -math.expm1(-x)


@dataclass(frozen=True, kw_only=True)
class GklsDissipator(_DissipatorGeneric):
    """Γ(n̄+1) D[σ⁻] + Γ n̄ D[σ⁺] on a qubit, with D[A]ρ = 2AρA† − A†Aρ − ρA†A.

    :param omega: Qubit frequency.
    :param temperature: Bath temperature.
    """

    omega: float
    temperature: float

    @property
    def occupation(self) -> float:
        return bose_occupation(self.omega, self.temperature)

    @override
    def generator(self) -> sparse.csr_array:
        n_bar = self.occupation
        lowering = lindblad_term(self.lift(sigma_minus()))
        raising = lindblad_term(self.lift(sigma_plus()))
        return (self.rate * ((n_bar + 1) * lowering + n_bar * raising)).tocsr()


@dataclass(frozen=True, kw_only=True)
class PairGklsDissipator(_DissipatorGeneric):
    """Thermal GKLS dissipator on the target transition (k, l) with jump operators |k⟩⟨l| and |l⟩⟨k|."""

    pair: Pair
    omega: float
    temperature: float

    @override
    def __post_init__(self) -> None:
        super().__post_init__()
        ensure_pair(self.pair, self.local_dim)

    @override
    def generator(self) -> sparse.csr_array:
        low, high = self.pair
        n_bar = bose_occupation(self.omega, self.temperature)
        lowering = lindblad_term(self.lift(ket_bra(self.local_dim, low, high)))
        raising = lindblad_term(self.lift(ket_bra(self.local_dim, high, low)))
        return (self.rate * ((n_bar + 1) * lowering + n_bar * raising)).tocsr()
