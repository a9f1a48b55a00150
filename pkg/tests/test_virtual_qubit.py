import math

import numpy as np
import pytest

from modules.operator_core import thermal_populations
from modules.virtual_qubit import (
    TwoQubitMachine,
    effective_rate_qvir,
    inverse_temperature,
    norm_of,
    virtual_qubit_of,
    virtual_temperature,
)


def _machine(**fields: float) -> TwoQubitMachine:
    defaults = {"omega1": 4.5, "omega2": 2.5, "temp1": 3.1, "temp2": 1.2, "rate1": 70.0, "rate2": 50.0}
    return TwoQubitMachine(**(defaults | fields))


def test_virtual_temperature_formula() -> None:
    """Test T_v = (Ω₁ − Ω₂) / (Ω₁/T₁ − Ω₂/T₂)."""
    # arrange
    m = _machine()
    # act
    t_v = virtual_temperature(m)
    # assert
    assert math.isclose(t_v, 2.0 / (4.5 / 3.1 - 2.5 / 1.2), rel_tol=1e-12)
    assert t_v < 0


def test_equal_baths_give_bath_temperature() -> None:
    """Test that a machine with both qubits at T has virtual temperature T."""
    # arrange
    m = _machine(temp1=2.0, temp2=2.0)
    # act / assert
    assert math.isclose(virtual_temperature(m), 2.0, rel_tol=1e-12)


def test_vanishing_second_qubit_gives_first_bath() -> None:
    """Test that T_v approaches T₁ as Ω₂ goes to zero."""
    # arrange
    m = _machine(omega1=2.0, omega2=1e-6, temp1=1.7, temp2=0.3)
    # act / assert
    assert math.isclose(virtual_temperature(m), 1.7, rel_tol=1e-5)


def test_virtual_populations_are_boltzmann_at_virtual_temperature() -> None:
    """Test that the virtual qubit's populations are thermal at T_v for random positive-T_v machines."""
    # arrange
    rng = np.random.default_rng(3)
    # act
    for _ in range(200):
        omega2 = rng.uniform(0.1, 3.0)
        omega1 = omega2 + rng.uniform(0.1, 3.0)
        temp1, temp2 = rng.uniform(0.2, 10.0, size=2)
        m = TwoQubitMachine(omega1=omega1, omega2=omega2, temp1=temp1, temp2=temp2)
        vq = virtual_qubit_of(m)
        # assert
        assert math.isclose(vq.pop_ground + vq.pop_excited, 1.0, abs_tol=1e-15)
        assert math.isclose(math.log(vq.pop_excited / vq.pop_ground), -m.gap / vq.vtemp, rel_tol=1e-9, abs_tol=1e-12)


def test_norm_is_weight_of_the_manifold() -> None:
    """Test n_vir = τ₁^g τ₂^e + τ₁^e τ₂^g."""
    # arrange
    m = _machine()
    g1, e1 = thermal_populations(4.5, 3.1)
    g2, e2 = thermal_populations(2.5, 1.2)
    # act
    vq = virtual_qubit_of(m)
    # assert
    assert math.isclose(vq.norm, g1 * e2 + e1 * g2, rel_tol=1e-14)
    assert norm_of(m) == vq.norm
    assert 0 < vq.norm < 1


def test_inversion_past_threshold() -> None:
    """Test that T_v changes sign where Ω₁/T₁ = Ω₂/T₂."""
    # arrange
    below = _machine(omega1=4.5, omega2=1.5, temp1=3.5, temp2=1.2)
    above = _machine(omega1=4.5, omega2=1.5, temp1=3.7, temp2=1.2)
    # act
    vq_below, vq_above = virtual_qubit_of(below), virtual_qubit_of(above)
    # assert
    assert vq_below.vtemp > 0
    assert vq_above.vtemp < 0
    assert vq_above.pop_excited > vq_above.pop_ground


def test_effective_rate() -> None:
    """Test q_vir = 2g²/(Q₁ + Q₂) · n_vir."""
    # arrange
    m = _machine(coupling=1.5)
    # act
    q_vir = effective_rate_qvir(m)
    # assert
    assert math.isclose(q_vir, 2 * 1.5**2 / 120.0 * norm_of(m), rel_tol=1e-14)


def test_effective_rate_needs_baths() -> None:
    """Test that a machine without bath rates has no effective rate."""
    # arrange
    m = _machine(rate1=0.0, rate2=0.0, coupling=1.0)
    # act / assert
    with pytest.raises(ValueError, match="no thermalisation"):
        effective_rate_qvir(m)


def test_degenerate_machine_is_rejected() -> None:
    """Test that Ω₁ = Ω₂ is refused."""
    # act / assert
    with pytest.raises(ValueError, match="degenerate machine"):
        _machine(omega1=2.0, omega2=2.0)


def test_non_positive_temperature_is_rejected() -> None:
    """Test that bath temperatures must be positive."""
    # act / assert
    with pytest.raises(ValueError, match="bath temperatures must be positive"):
        _machine(temp1=0.0)


def test_with_baths_keeps_other_fields() -> None:
    """Test that changing the baths leaves energies and rates untouched."""
    # arrange
    m = _machine(coupling=0.7)
    # act
    warmer = m.with_baths(6.0, 1.2)
    # assert
    assert warmer.temp1 == 6.0
    assert warmer.coupling == 0.7
    assert warmer.omega2 == m.omega2


def test_infinite_temperature_has_zero_inverse() -> None:
    """Test β = 0 at T = ∞."""
    # act / assert
    assert inverse_temperature(math.inf) == 0.0
    assert inverse_temperature(2.0) == 0.5


@pytest.mark.parametrize(
    ("fields", "expected"),
    [
        ({"omega1": 2.5, "omega2": 0.5, "temp1": 3.1, "temp2": 1.2}, 5.1310),
        ({"omega1": 4.5, "omega2": 1.5, "temp1": 5.0, "temp2": 1.2}, -8.5714),
    ],
    ids=["cooling", "inverted"],
)
def test_virtual_temperature_values(fields: dict[str, float], expected: float) -> None:
    """Test T_v of a cooling machine and of an inverted one against direct evaluation."""
    # act / assert
    assert virtual_temperature(_machine(**fields)) == pytest.approx(expected, abs=1e-4)


def test_norm_and_effective_rate_values() -> None:
    """Test n_vir and q_vir of the Ω 2.5/0.5, T 3.1/1.2 machine at g = 1.2 and Q = 70/50."""
    # arrange
    m = _machine(omega1=2.5, omega2=0.5, coupling=1.2)
    # act
    vq = virtual_qubit_of(m)
    # assert
    assert vq.norm == pytest.approx(0.460702, rel=1e-5)
    assert effective_rate_qvir(m) == pytest.approx(0.024 * 0.460702, rel=1e-5)


def test_effective_rate_is_quadratic_in_coupling() -> None:
    """Test q_vir(2g) = 4 q_vir(g)."""
    # arrange
    m = _machine(coupling=0.35)
    # act
    single = effective_rate_qvir(m)
    double = effective_rate_qvir(m.with_coupling(0.7))
    # assert
    assert math.isclose(double, 4 * single, rel_tol=1e-14)
