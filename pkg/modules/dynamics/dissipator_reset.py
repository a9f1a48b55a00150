"""Implements reset dissipators: a subsystem or a target transition replaced by a fixed state at rate Q."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, override

import numpy as np

from modules.operator_core import Operator, ket_bra
from modules.typing import ensure_pair

from .dissipator_generic import _DissipatorGeneric
from .superoperator import kraus_term

if TYPE_CHECKING:
    from scipy import sparse

    from modules.typing import Pair


@dataclass(frozen=True, kw_only=True)
class ResetDissipator(_DissipatorGeneric):
    """Q (τ ⊗ Tr_i[ρ] − ρ) on subsystem i.

    :param populations: Diagonal of τ, one entry per level of the subsystem.
    """

    populations: tuple[float, ...]

    @override
    def __post_init__(self) -> None:
        super().__post_init__()
        if len(self.populations) != self.local_dim:
            raise ValueError(f"reset state has {len(self.populations)} populations for a {self.local_dim}-level system")

        if min(self.populations) < 0 or not math.isclose(sum(self.populations), 1.0, abs_tol=1e-10):
            raise ValueError(f"invalid reset populations {self.populations}")

    @override
    def generator(self) -> sparse.csr_array:
        # Kraus operators √τ_x |x⟩⟨y| realise ρ ↦ τ ⊗ Tr_i[ρ]
        d = self.local_dim
        kraus = [
            self.lift(Operator.local(math.sqrt(p) * ket_bra(d, x, y).matrix))
            for x, p in enumerate(self.populations)
            if p > 0
            for y in range(d)
        ]
        return (self.rate * kraus_term(kraus)).tocsr()


@dataclass(frozen=True, kw_only=True)
class PairResetDissipator(_DissipatorGeneric):
    """Resets the target transition (k, l) towards (τ^g, τ^e), leaving the other levels alone.

    On a qubit target this is Q (τ ⊗ Tr_tar[ρ] − ρ).
    """

    pair: Pair
    populations: tuple[float, float]

    @override
    def __post_init__(self) -> None:
        super().__post_init__()
        ensure_pair(self.pair, self.local_dim)

    @override
    def generator(self) -> sparse.csr_array:
        d = self.local_dim
        kraus = [
            self.lift(Operator.local(math.sqrt(p) * ket_bra(d, x, y).matrix))
            for x, p in zip(self.pair, self.populations)
            if p > 0
            for y in self.pair
        ]
        rest = np.diag([0.0 if j in self.pair else 1.0 for j in range(d)]).astype(np.complex128)
        if rest.any():
            kraus.append(self.lift(Operator.local(rest)))

        return (self.rate * kraus_term(kraus)).tocsr()
