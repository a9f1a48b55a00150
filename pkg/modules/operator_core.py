"""Dense operator algebra on composite Hilbert spaces.

Subsystems are ordered `[target, machine qubits in declaration order]` and basis states follow the
Kronecker convention: the first subsystem is the most significant digit of a basis index. Units are
ħ = k_B = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import TYPE_CHECKING

import numpy as np
from scipy.special import expit

from modules.data import (
    HERMITICITY_TOLERANCE,
    MAX_DIMENSION,
    POSITIVITY_TOLERANCE,
    TRACE_TOLERANCE,
)
from modules.typing import ensure_square_matrix

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from modules.typing import ComplexArray, IntArray


@dataclass(frozen=True, kw_only=True)
class HilbertLayout:
    """Ordered subsystem dimensions of a composite space.

    :param dims: Dimension of every subsystem, each ≥ 2. Empty for the 1×1 scalar left by tracing out everything.
    :param target_index: Index of the target subsystem.
    :param max_dimension: Dense-matrix cap on the total dimension.
    """

    dims: tuple[int, ...]
    target_index: int = 0
    max_dimension: int = MAX_DIMENSION

    def __post_init__(self) -> None:
        if not self.dims:
            return

        if any(d < 2 for d in self.dims):
            raise ValueError(f"subsystem dimensions must be >= 2, got {self.dims}")

        self.ensure_index(self.target_index)
        if self.dimension > self.max_dimension:
            raise ValueError(f"composite dimension {self.dimension} exceeds the dense limit {self.max_dimension}")

    @property
    def dimension(self) -> int:
        return math.prod(self.dims)

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def ensure_index(self, index: int) -> None:
        if not 0 <= index < len(self.dims):
            raise ValueError(f"subsystem index {index} out of range for {len(self.dims)} subsystems")

    def concat(self, other: HilbertLayout) -> HilbertLayout:
        return HilbertLayout(
            dims=self.dims + other.dims,
            target_index=self.target_index,
            max_dimension=max(self.max_dimension, other.max_dimension),
        )

    def keep(self, indices: Iterable[int]) -> HilbertLayout:
        """Layout of the kept subsystems, in their original order."""
        kept = sorted(set(indices))
        target = kept.index(self.target_index) if self.target_index in kept else 0
        return HilbertLayout(dims=tuple(self.dims[i] for i in kept), target_index=target)

    def digits(self, index: int) -> IntArray:
        """Per-subsystem digit of every basis state for subsystem `index`."""
        self.ensure_index(index)
        stride = math.prod(self.dims[index + 1 :])
        return (np.arange(self.dimension) // stride) % self.dims[index]


def single_layout(dim: int) -> HilbertLayout:
    return HilbertLayout(dims=(dim,))


SCALAR_LAYOUT = HilbertLayout(dims=())


@dataclass(frozen=True, kw_only=True)
class Operator:
    """A square complex matrix on an explicit layout. The buffer is read-only."""

    matrix: ComplexArray
    layout: HilbertLayout

    def __post_init__(self) -> None:
        ensure_square_matrix(self.matrix)
        matrix = np.array(self.matrix, dtype=np.complex128)
        if matrix.shape[0] != self.layout.dimension:
            raise ValueError(f"matrix dimension {matrix.shape[0]} does not match layout {self.layout.dims}")

        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def local(cls, matrix: ComplexArray) -> Operator:
        """Wraps a matrix as a single-subsystem operator."""
        ensure_square_matrix(matrix)
        return cls(matrix=matrix, layout=single_layout(matrix.shape[0]))

    @property
    def dimension(self) -> int:
        return self.layout.dimension

    @property
    def dagger(self) -> Operator:
        return Operator(matrix=self.matrix.conj().T, layout=self.layout)

    def __matmul__(self, other: Operator) -> Operator:
        return Operator(matrix=self.matrix @ other.matrix, layout=self.layout)

    def __add__(self, other: Operator) -> Operator:
        return Operator(matrix=self.matrix + other.matrix, layout=self.layout)

    def __sub__(self, other: Operator) -> Operator:
        return Operator(matrix=self.matrix - other.matrix, layout=self.layout)

    def scaled(self, factor: complex) -> Operator:
        return Operator(matrix=factor * self.matrix, layout=self.layout)

    def commutator(self, other: Operator) -> Operator:
        return Operator(matrix=self.matrix @ other.matrix - other.matrix @ self.matrix, layout=self.layout)

    def is_hermitian(self, tol: float = HERMITICITY_TOLERANCE) -> bool:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0)) <= tol


@dataclass(frozen=True, kw_only=True)
class DensityMatrix:
    """Hermitian, trace-one, positive operator (all to tolerance).

    :param op: The underlying operator.
    :param positivity_tolerance: Magnitude of the most negative eigenvalue accepted.
    """

    op: Operator
    positivity_tolerance: float = POSITIVITY_TOLERANCE

    def __post_init__(self) -> None:
        m = self.op.matrix
        if not self.op.is_hermitian():
            raise ValueError("density matrix is not Hermitian")

        trace = complex(np.trace(m))
        if abs(trace - 1) > TRACE_TOLERANCE:
            raise ValueError(f"density matrix trace {trace:.3e} differs from 1")

        smallest = float(np.linalg.eigvalsh(m)[0])
        if smallest < -self.positivity_tolerance:
            raise ValueError(f"density matrix has negative eigenvalue {smallest:.3e}")

    @classmethod
    def from_matrix(
        cls,
        matrix: ComplexArray,
        layout: HilbertLayout,
        *,
        positivity_tolerance: float = POSITIVITY_TOLERANCE,
    ) -> DensityMatrix:
        return cls(op=Operator(matrix=matrix, layout=layout), positivity_tolerance=positivity_tolerance)

    @classmethod
    def diagonal(cls, populations: Sequence[float], layout: HilbertLayout | None = None) -> DensityMatrix:
        probs = np.asarray(populations, dtype=np.float64)
        return cls.from_matrix(np.diag(probs).astype(np.complex128), layout or single_layout(len(probs)))

    @property
    def matrix(self) -> ComplexArray:
        return self.op.matrix

    @property
    def layout(self) -> HilbertLayout:
        return self.op.layout

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.op.matrix)).copy()

    def purity(self) -> float:
        return float(np.real(np.trace(self.op.matrix @ self.op.matrix)))


def tensor_product(ops: Sequence[Operator]) -> Operator:
    """Kronecker product preserving subsystem order.

    :param ops: Operands, first is most significant.
    :return: Operator on the concatenated layout.
    """
    if not ops:
        raise ValueError("no operands")

    matrix = reduce(np.kron, (op.matrix for op in ops))
    layout = reduce(lambda a, b: a.concat(b), (op.layout for op in ops))
    return Operator(matrix=matrix, layout=layout)


def tensor_states(states: Sequence[DensityMatrix]) -> DensityMatrix:
    return DensityMatrix(op=tensor_product([s.op for s in states]))


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the kept subsystems.

    :param rho: State on a composite layout.
    :param keep: Subsystem indices to keep; empty gives the 1×1 trace.
    :return: Reduced density matrix, subsystems in original order.
    """
    layout = rho.layout
    kept = sorted(set(keep))
    for index in kept:
        layout.ensure_index(index)

    n = layout.n_subsystems
    tensor = rho.matrix.reshape(layout.dims + layout.dims)
    # einsum labels: rows a.., columns shared for traced subsystems
    row_labels = [chr(ord("a") + i) for i in range(n)]
    col_labels = [row_labels[i] if i not in kept else chr(ord("A") + i) for i in range(n)]
    out_labels = [row_labels[i] for i in kept] + [col_labels[i] for i in kept]
    reduced = np.einsum(f"{''.join(row_labels)}{''.join(col_labels)}->{''.join(out_labels)}", tensor)

    if not kept:
        return DensityMatrix.from_matrix(np.array([[reduced]]), SCALAR_LAYOUT)

    sub_dim = math.prod(layout.dims[i] for i in kept)
    return DensityMatrix.from_matrix(
        reduced.reshape(sub_dim, sub_dim),
        layout.keep(kept),
        positivity_tolerance=rho.positivity_tolerance,
    )


def reduced_target(rho: DensityMatrix) -> DensityMatrix:
    return partial_trace(rho, [rho.layout.target_index])


def thermal_populations(gap: float, temperature: float) -> tuple[float, float]:
    """Boltzmann populations of a two-level system.

    :param gap: Level spacing, > 0.
    :param temperature: Signed temperature; ±inf and ±0.0 are limits.
    :return: (pop_ground, pop_excited), summing to 1 exactly.
    """
    if gap <= 0:
        raise ValueError(f"non-positive gap: {gap}")

    if math.isinf(temperature):
        return 0.5, 0.5

    if temperature == 0:
        return (1.0, 0.0) if math.copysign(1.0, temperature) > 0 else (0.0, 1.0)

    if temperature > 0:
        pop_excited = float(expit(-gap / temperature))
        return 1.0 - pop_excited, pop_excited

    pop_ground = float(expit(gap / temperature))
    return pop_ground, 1.0 - pop_ground


def thermal_state(gap: float, temperature: float) -> DensityMatrix:
    return DensityMatrix.diagonal(thermal_populations(gap, temperature))


def gibbs_populations(energies: Sequence[float], temperature: float) -> np.ndarray:
    """Gibbs populations of an n-level spectrum at a positive temperature."""
    e = np.asarray(energies, dtype=np.float64)
    weights = np.exp(-(e - e.min()) / temperature)
    return weights / weights.sum()


def identity(dim: int) -> Operator:
    return Operator.local(np.eye(dim, dtype=np.complex128))


def ket_bra(dim: int, row: int, col: int) -> Operator:
    """|row⟩⟨col| on a single subsystem."""
    m = np.zeros((dim, dim), dtype=np.complex128)
    m[row, col] = 1.0
    return Operator.local(m)


def sigma_plus() -> Operator:
    """σ⁺ = |1⟩⟨0|."""
    return ket_bra(2, 1, 0)


def sigma_minus() -> Operator:
    """σ⁻ = |0⟩⟨1|."""
    return ket_bra(2, 0, 1)


def number_operator() -> Operator:
    """σ⁺σ⁻ = |1⟩⟨1|."""
    return ket_bra(2, 1, 1)


def embed(local: Operator, index: int, layout: HilbertLayout) -> Operator:
    """Lifts a single-subsystem operator into a composite layout.

    :param local: Operator on subsystem `index`.
    :param index: Target subsystem.
    :param layout: Composite layout.
    :return: I ⊗ … ⊗ local ⊗ … ⊗ I.
    """
    layout.ensure_index(index)
    if local.dimension != layout.dims[index]:
        raise ValueError(f"operator dimension {local.dimension} does not fit subsystem {index}")

    factors = [local if i == index else identity(d) for i, d in enumerate(layout.dims)]
    product = tensor_product(factors)
    return Operator(matrix=product.matrix, layout=layout)


def embed_many(locals_: dict[int, Operator], layout: HilbertLayout) -> Operator:
    """Lifts a product of single-subsystem operators on distinct subsystems."""
    for index in locals_:
        layout.ensure_index(index)

    factors = [locals_.get(i, identity(d)) for i, d in enumerate(layout.dims)]
    product = tensor_product(factors)
    return Operator(matrix=product.matrix, layout=layout)


def frobenius_distance(a: ComplexArray, b: ComplexArray) -> float:
    return float(np.linalg.norm(a - b, ord="fro"))


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """½‖a − b‖₁."""
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a.matrix - b.matrix))))

