import math

import numpy as np
import pytest

from modules.operator_core import (
    SCALAR_LAYOUT,
    DensityMatrix,
    HilbertLayout,
    Operator,
    embed,
    embed_many,
    gibbs_populations,
    partial_trace,
    sigma_minus,
    sigma_plus,
    tensor_product,
    tensor_states,
    thermal_populations,
    thermal_state,
    trace_distance,
)


def _random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def test_layout_rejects_oversized_space() -> None:
    """Test that a composite space beyond the dense cap is refused."""
    # arrange
    dims = (3, 2, 2, 2, 2, 2, 2)
    # act / assert
    with pytest.raises(ValueError, match="exceeds the dense limit"):
        HilbertLayout(dims=dims, max_dimension=100)


def test_layout_digits() -> None:
    """Test that basis digits follow the Kronecker convention."""
    # arrange
    layout = HilbertLayout(dims=(3, 2))
    # act
    target = layout.digits(0)
    qubit = layout.digits(1)
    # assert
    assert target.tolist() == [0, 0, 1, 1, 2, 2]
    assert qubit.tolist() == [0, 1, 0, 1, 0, 1]


def test_sigma_plus_raises_the_qubit() -> None:
    """Test that σ⁺ maps |0⟩ to |1⟩ and σ⁻ is its adjoint."""
    # arrange
    ground = np.array([1.0, 0.0])
    # act
    raised = sigma_plus().matrix @ ground
    # assert
    assert np.allclose(raised, [0.0, 1.0])
    assert np.allclose(sigma_minus().matrix, sigma_plus().dagger.matrix)


def test_density_matrix_validation() -> None:
    """Test that non-Hermitian, unnormalised and negative matrices are rejected."""
    # arrange
    layout = HilbertLayout(dims=(2,))
    # act / assert
    with pytest.raises(ValueError, match="Hermitian"):
        DensityMatrix.from_matrix(np.array([[0.5, 0.1], [0.0, 0.5]], dtype=np.complex128), layout)
    with pytest.raises(ValueError, match="trace"):
        DensityMatrix.from_matrix(np.diag([0.5, 0.6]).astype(np.complex128), layout)
    with pytest.raises(ValueError, match="negative eigenvalue"):
        DensityMatrix.from_matrix(np.diag([1.5, -0.5]).astype(np.complex128), layout)


def test_partial_trace_of_product_state() -> None:
    """Test that tracing out a factor of a product state returns the other factor."""
    # arrange
    rng = np.random.default_rng(7)
    a = DensityMatrix.from_matrix(_random_state(rng, 3), HilbertLayout(dims=(3,)))
    b = DensityMatrix.from_matrix(_random_state(rng, 2), HilbertLayout(dims=(2,)))
    c = DensityMatrix.from_matrix(_random_state(rng, 2), HilbertLayout(dims=(2,)))
    rho = tensor_states([a, b, c])
    # act
    reduced_a = partial_trace(rho, [0])
    reduced_bc = partial_trace(rho, [1, 2])
    # assert
    assert np.allclose(reduced_a.matrix, a.matrix, atol=1e-12)
    assert np.allclose(reduced_bc.matrix, np.kron(b.matrix, c.matrix), atol=1e-12)
    assert reduced_bc.layout.dims == (2, 2)


def test_partial_trace_preserves_trace() -> None:
    """Test that random states reduce to unit-trace states on every subsystem subset."""
    # arrange
    rng = np.random.default_rng(11)
    layout = HilbertLayout(dims=(3, 2, 2))
    # act
    for _ in range(20):
        rho = DensityMatrix.from_matrix(_random_state(rng, 12), layout)
        for keep in ([0], [1], [2], [0, 2], [1, 2]):
            reduced = partial_trace(rho, keep)
            # assert
            assert abs(np.trace(reduced.matrix) - 1) < 1e-12


def test_partial_trace_of_everything() -> None:
    """Test that tracing out every subsystem leaves the 1×1 trace."""
    # arrange
    rho = DensityMatrix.diagonal([0.25, 0.75])
    # act
    scalar = partial_trace(rho, [])
    # assert
    assert scalar.layout == SCALAR_LAYOUT
    assert scalar.matrix.shape == (1, 1)
    assert abs(scalar.matrix[0, 0] - 1) < 1e-15


def test_embed_matches_kronecker_product() -> None:
    """Test that lifting a local operator equals I ⊗ A ⊗ I."""
    # arrange
    layout = HilbertLayout(dims=(3, 2, 2))
    # act
    lifted = embed(sigma_plus(), 1, layout)
    pair = embed_many({1: sigma_plus(), 2: sigma_minus()}, layout)
    # assert
    assert np.allclose(lifted.matrix, np.kron(np.kron(np.eye(3), sigma_plus().matrix), np.eye(2)))
    expected = np.kron(np.eye(3), np.kron(sigma_plus().matrix, sigma_minus().matrix))
    assert np.allclose(pair.matrix, expected)


def test_embed_rejects_wrong_dimension() -> None:
    """Test that a qubit operator cannot be placed on the qutrit."""
    # arrange
    layout = HilbertLayout(dims=(3, 2))
    # act / assert
    with pytest.raises(ValueError, match="does not fit"):
        embed(sigma_plus(), 0, layout)


def test_tensor_product_needs_operands() -> None:
    """Test that an empty product is an error."""
    # act / assert
    with pytest.raises(ValueError, match="no operands"):
        tensor_product([])


def test_thermal_populations() -> None:
    """Test the Boltzmann populations and their temperature limits."""
    # act
    ground, excited = thermal_populations(1.0, 1.0)
    # assert
    assert math.isclose(excited / ground, math.exp(-1.0))
    assert math.isclose(ground + excited, 1.0, abs_tol=1e-15)
    assert thermal_populations(1.0, math.inf) == (0.5, 0.5)
    assert thermal_populations(1.0, 0.0) == (1.0, 0.0)
    assert thermal_populations(1.0, -0.0) == (0.0, 1.0)
    negative_ground, negative_excited = thermal_populations(1.0, -1.0)
    assert negative_excited > negative_ground


def test_thermal_populations_rejects_non_positive_gap() -> None:
    """Test that a zero gap has no Boltzmann populations."""
    # act / assert
    with pytest.raises(ValueError, match="non-positive gap"):
        thermal_populations(0.0, 1.0)


def test_gibbs_populations_match_qubit_limit() -> None:
    """Test that the n-level Gibbs state reduces to the qubit one."""
    # act
    pops = gibbs_populations([0.0, 2.0], 3.1)
    # assert
    assert np.allclose(pops, thermal_populations(2.0, 3.1))


def test_trace_distance() -> None:
    """Test trace distance between orthogonal and between identical states."""
    # arrange
    ground = thermal_state(1.0, 0.0)
    excited = DensityMatrix.diagonal([0.0, 1.0])
    # act / assert
    assert math.isclose(trace_distance(ground, excited), 1.0)
    assert trace_distance(ground, ground) == 0.0


def test_operator_buffer_is_read_only() -> None:
    """Test that an operator cannot be modified in place."""
    # arrange
    op = Operator.local(np.eye(2, dtype=np.complex128))
    # act / assert
    with pytest.raises(ValueError, match="read-only"):
        op.matrix[0, 0] = 2.0


def test_partial_trace_of_bell_state() -> None:
    """Test that either half of a maximally entangled pair is maximally mixed."""
    # arrange
    ket = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2)
    rho = DensityMatrix.from_matrix(np.outer(ket, ket).astype(np.complex128), HilbertLayout(dims=(2, 2)))
    # act / assert
    for keep in ([0], [1]):
        assert np.allclose(partial_trace(rho, keep).matrix, np.eye(2) / 2, atol=1e-15)
