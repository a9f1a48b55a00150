"""Vectorised generators.

Density matrices are column-stacked, vec(ρ)[a + b·d] = ρ[a, b], so that vec(AρB) = (Bᵀ ⊗ A) vec(ρ).
Generators are assembled sparsely on the whole d² space and stored as dense matrices on a support: the
span of |a⟩⟨b| with equal free energies E_a = E_b, which both the Hamiltonian (it conserves H₀) and every
dissipator here (each Kraus or jump operator shifts the free energy by a fixed amount) leave invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
from loguru import logger
from scipy import sparse

from modules.data import ENERGY_TOLERANCE, MAX_FULL_SUPEROPERATOR_DIMENSION, TRACE_TOLERANCE
from modules.operator_core import DensityMatrix, HilbertLayout

if TYPE_CHECKING:
    from collections.abc import Sequence

    from modules.typing import ComplexArray, FloatArray, IntArray


def to_sparse(matrix: ComplexArray) -> sparse.csr_array:
    return sparse.csr_array(matrix)


def identity_superoperator(dim: int) -> sparse.csr_array:
    return sparse.eye_array(dim * dim, dtype=np.complex128, format="csr")


def commutator_term(h: ComplexArray) -> sparse.csr_array:
    """−i[H, ·] as −i(I ⊗ H − Hᵀ ⊗ I)."""
    hs = to_sparse(h)
    eye = sparse.eye_array(h.shape[0], dtype=np.complex128, format="csr")
    return (-1j * (sparse.kron(eye, hs) - sparse.kron(hs.T, eye))).tocsr()


def sandwich_term(a: ComplexArray) -> sparse.csr_array:
    """ρ ↦ AρA†."""
    a_s = to_sparse(a)
    return sparse.kron(a_s.conj(), a_s).tocsr()


def lindblad_term(a: ComplexArray) -> sparse.csr_array:
    """ρ ↦ 2AρA† − A†Aρ − ρA†A."""
    a_s = to_sparse(a)
    ada = (a_s.conj().T @ a_s).tocsr()
    eye = sparse.eye_array(a.shape[0], dtype=np.complex128, format="csr")
    return (2 * sparse.kron(a_s.conj(), a_s) - sparse.kron(eye, ada) - sparse.kron(ada.T, eye)).tocsr()


def kraus_term(kraus: Sequence[ComplexArray]) -> sparse.csr_array:
    """ρ ↦ Σ KρK† − ρ, the generator of a reset through the channel with Kraus operators `kraus`."""
    dim = kraus[0].shape[0]
    total = sparse.csr_array((dim * dim, dim * dim), dtype=np.complex128)
    for k in kraus:
        total = total + sandwich_term(k)

    return (total - identity_superoperator(dim)).tocsr()


def vec(matrix: ComplexArray) -> ComplexArray:
    return np.asarray(matrix).ravel(order="F")


def unvec(vector: ComplexArray, dim: int) -> ComplexArray:
    return np.asarray(vector).reshape((dim, dim), order="F")


def energy_support(energies: FloatArray) -> IntArray:
    """Column-stacked indices of |a⟩⟨b| with |E_a − E_b| below the energy tolerance."""
    same = np.abs(energies[:, None] - energies[None, :]) < ENERGY_TOLERANCE
    return np.flatnonzero(same.ravel(order="F"))


@dataclass(frozen=True, kw_only=True)
class Superoperator:
    """Generator restricted to an invariant subspace of column-stacked operators.

    :param matrix: Dense generator on the support, shape (len(support), len(support)).
    :param layout: Hilbert-space layout of the density matrices it acts on.
    :param support: Column-stacked flat indices spanned; all of range(d²) for a full generator.
    :param assembled: Sparse generator on the whole d² space it was restricted from, if any.
    """

    matrix: ComplexArray
    layout: HilbertLayout
    support: IntArray
    assembled: sparse.csr_array | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=np.complex128)
        support = np.array(self.support, dtype=np.intp)
        if matrix.shape != (support.size, support.size):
            raise ValueError(f"generator shape {matrix.shape} does not match support size {support.size}")

        matrix.flags.writeable = False
        support.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "support", support)

        defect = self.trace_defect()
        if defect > TRACE_TOLERANCE * max(1.0, float(np.max(np.abs(matrix), initial=0.0))):
            raise ValueError(f"generator is not trace-preserving: |vec(I)† L| = {defect:.3e}")

    @classmethod
    def from_sparse(
        cls,
        generator: sparse.csr_array,
        layout: HilbertLayout,
        *,
        support: IntArray | None = None,
    ) -> Superoperator:
        """Restricts a full d² × d² generator to `support` (everything when `None`).

        :raise ValueError: When the support is not invariant under the generator.
        """
        d2 = layout.dimension**2
        if support is None:
            if layout.dimension > MAX_FULL_SUPEROPERATOR_DIMENSION:
                raise ValueError(
                    f"full superoperator for dimension {layout.dimension} exceeds the limit "
                    f"{MAX_FULL_SUPEROPERATOR_DIMENSION}; restrict it to an energy support",
                )

            return cls(matrix=generator.toarray(), layout=layout, support=np.arange(d2))

        columns = generator.tocsc()[:, support]
        inside = np.zeros(d2, dtype=bool)
        inside[support] = True
        leak = columns.tocsr()[np.flatnonzero(~inside), :]
        leakage = float(np.max(np.abs(leak.data), initial=0.0))
        if leakage > TRACE_TOLERANCE:
            raise ValueError(f"support is not invariant under the generator (leakage {leakage:.3e})")

        restricted = columns.tocsr()[support, :].toarray()
        logger.debug(f"generator restricted from {d2} to {support.size} operator-space dimensions")
        return cls(matrix=restricted, layout=layout, support=support, assembled=generator)

    @property
    def dimension(self) -> int:
        """Dimension of the operator space the generator acts on."""
        return int(self.support.size)

    @property
    def is_full(self) -> bool:
        return self.dimension == self.layout.dimension**2

    def trace_row(self) -> ComplexArray:
        """vec(I) restricted to the support."""
        return vec(np.eye(self.layout.dimension, dtype=np.complex128))[self.support]

    def trace_defect(self) -> float:
        """‖vec(I)† L‖ (zero for a trace-preserving generator)."""
        return float(np.linalg.norm(self.trace_row().conj() @ self.matrix))

    def covers(self, rho: DensityMatrix | ComplexArray) -> bool:
        """Whether ρ lies inside the support."""
        matrix = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
        outside = np.delete(vec(matrix), self.support)
        return not outside.size or float(np.max(np.abs(outside))) <= TRACE_TOLERANCE

    def widened(self) -> Superoperator:
        """The same generator on the whole operator space.

        :raise ValueError: When the layout exceeds the dense limit or nothing was assembled to widen.
        """
        if self.is_full:
            return self

        if self.assembled is None:
            raise ValueError("restricted generator has no assembled generator to widen")

        return Superoperator.from_sparse(self.assembled, self.layout)

    def restrict(self, rho: DensityMatrix | ComplexArray) -> ComplexArray:
        """vec(ρ) on the support.

        :raise ValueError: When ρ has weight outside the support.
        """
        if not self.covers(rho):
            raise ValueError("state has weight outside the generator's support")

        matrix = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
        return vec(matrix)[self.support]

    def expand(self, vector: ComplexArray) -> ComplexArray:
        """Matrix of a support vector, zero elsewhere."""
        full = np.zeros(self.layout.dimension**2, dtype=np.complex128)
        full[self.support] = vector
        return unvec(full, self.layout.dimension)

    def apply(self, rho: DensityMatrix | ComplexArray) -> ComplexArray:
        """L(ρ) as a matrix."""
        return self.expand(self.matrix @ self.restrict(rho))
