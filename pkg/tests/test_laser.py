import math
from pathlib import Path

import numpy as np
import pytest

from modules.config import load_config
from modules.laser import (
    CURVES,
    LaserConfig,
    Scheme,
    curve_crossings,
    inversion,
    inversion_sweep,
    inversion_threshold,
    laser_norms,
    laser_steady_state,
    laser_virtual_temperatures,
    lasing_thresholds,
)

CONFIGS = Path(__file__).parents[1] / "configs"


def _laser(**changes: float) -> LaserConfig:
    fields = {
        "omega_b1": 4.5,
        "omega_c1": 1.3,
        "t_hot": 5.0,
        "t_cold": 1.2,
        "t_env": 7.2,
        "q_env": 0.1,
        "q_hot": 2.0,
        "q_cold": 1.5,
    }
    return LaserConfig(**(fields | changes))


def test_inversion_threshold() -> None:
    """Test that machine B inverts at T_h = (Ω_B1/Ω_B2) T_c = 3.6."""
    # act
    threshold = inversion_threshold(_laser())
    below, _ = laser_virtual_temperatures(_laser(t_hot=3.5))
    above, _ = laser_virtual_temperatures(_laser(t_hot=3.7))
    # assert
    assert math.isclose(threshold, 3.6, rel_tol=1e-12)
    assert below > 0
    assert above < 0


def test_cold_virtual_temperature_stays_below_cold_bath() -> None:
    """Test that machine C's virtual qubit is colder than the cold bath whenever T_h > T_c."""
    # act / assert
    for t_hot in (1.5, 5.0, 50.0):
        _, t_vc = laser_virtual_temperatures(_laser(t_hot=t_hot))
        assert 0 < t_vc < 1.2


def test_lossless_inversions_at_five() -> None:
    """Test p₁/p₀ of both lossless lasers at T_h = 5 against the virtual and bath Boltzmann factors."""
    # arrange
    cfg = _laser(t_hot=5.0)
    # act
    virtual = inversion(cfg, Scheme.VIRTUAL, lossless=True)
    typical = inversion(cfg, Scheme.TYPICAL, lossless=True)
    # assert
    assert math.isclose(virtual, math.exp(0.35 + 1.3 / 1.2 - 0.3 / 5.0), rel_tol=1e-10)
    assert abs(virtual - 3.9489) < 1e-3
    assert abs(typical - 1.2628) < 1e-3


def test_vanishing_second_qubits_recover_typical_laser() -> None:
    """Test that with Ω₂ → 0 the virtual laser reduces to the typical one."""
    # arrange
    cfg = _laser(omega_b1=3.0 + 1e-6, omega_c1=1.0 + 1e-6)
    # act
    t_vb, t_vc = laser_virtual_temperatures(cfg)
    virtual = inversion(cfg, Scheme.VIRTUAL, lossless=True)
    typical = inversion(cfg, Scheme.TYPICAL, lossless=True)
    # assert
    assert math.isclose(t_vb, 5.0, rel_tol=1e-4)
    assert math.isclose(t_vc, 1.2, rel_tol=1e-4)
    assert math.isclose(virtual, typical, rel_tol=1e-4)


def test_losses_lower_the_inversion() -> None:
    """Test that a warm environment on the lasing transition pulls both lasers towards its own ratio."""
    # arrange
    cfg = _laser(t_hot=10.0)
    # act / assert
    for scheme in Scheme:
        assert inversion(cfg, scheme, lossless=False) < inversion(cfg, scheme, lossless=True)


def test_steady_state_is_normalised() -> None:
    """Test the laser steady states and the machine norms."""
    # arrange
    cfg = _laser()
    # act
    probs = laser_steady_state(cfg, "virtual")
    n_b, n_c = laser_norms(cfg)
    # assert
    assert math.isclose(float(probs.probs.sum()), 1.0, abs_tol=1e-12)
    assert 0 < n_b < 1
    assert 0 < n_c < 1


def test_config_validation() -> None:
    """Test that the hot bath may not be colder than the cold one."""
    # act / assert
    with pytest.raises(ValueError, match="T_h >= T_c > 0"):
        _laser(t_hot=1.0)


def test_bundled_sweep() -> None:
    """Test the four inversion curves over the bundled temperature grid."""
    # arrange
    cfg = load_config(CONFIGS / "laser_inversion.toml")
    laser = cfg.require("laser", cfg.laser).build()
    values = cfg.require("sweep", cfg.sweep).values
    # act
    table = inversion_sweep(laser, values, jobs=2)
    thresholds = lasing_thresholds(table)
    # assert
    assert list(table.columns[:5]) == ["T_h", *CURVES]
    assert (table["error"] == "").all()
    inverted = table[table["T_h"] > 3.6]
    assert (inverted["virtual_lossless"] > inverted["typical_lossless"]).all()
    assert (inverted["virtual_lossy"] > inverted["typical_lossy"]).all()
    assert np.all(np.diff(inverted["virtual_lossless"]) > 0)
    assert len(thresholds["typical_lossless"]) == 1
    assert math.isclose(thresholds["typical_lossless"][0], 3.6, abs_tol=0.05)
    assert thresholds["virtual_lossless"][0] < thresholds["typical_lossless"][0]


def test_lossy_virtual_laser_outperforms_lossless_typical_laser() -> None:
    """Test that over the bundled grid the lossy virtual curve never drops to the lossless typical one."""
    # arrange
    cfg = load_config(CONFIGS / "laser_inversion.toml")
    laser = cfg.require("laser", cfg.laser).build()
    # act
    table = inversion_sweep(laser, cfg.require("sweep", cfg.sweep).values)
    # assert
    assert curve_crossings(table["T_h"], table["virtual_lossy"], table["typical_lossless"]) == []


def test_failed_point_is_recorded() -> None:
    """Test that a hot temperature below T_c is reported in the error column."""
    # act
    table = inversion_sweep(_laser(), [1.0, 5.0])
    # assert
    assert "T_h >= T_c" in table.loc[0, "error"]
    assert math.isnan(table.loc[0, "typical_lossless"])
    assert table.loc[1, "error"] == ""


def test_curve_crossings() -> None:
    """Test linear interpolation of crossings with a constant and with another curve."""
    # arrange
    x = [0.0, 1.0, 2.0, 3.0]
    # act / assert
    assert curve_crossings(x, [0.0, 2.0, 0.0, 2.0]) == [0.5, 1.5, 2.5]
    assert curve_crossings(x, [0.0, 1.0, 2.0, 3.0], [3.0, 2.0, 1.0, 0.0]) == [1.5]
    assert curve_crossings(x, [2.0, 2.0, 2.0, 2.0]) == []


def test_equal_baths_give_equilibrium_ratio() -> None:
    """Test that at T_h = T_c neither lossless laser inverts and both sit at e^{−(ω₁ − ω₀)/T_c}."""
    # arrange
    cfg = _laser(t_hot=1.2)
    # act / assert
    for scheme in Scheme:
        ratio = inversion(cfg, scheme, lossless=True)
        assert math.isclose(ratio, math.exp(-2.0 / 1.2), rel_tol=1e-9)
        assert ratio < 1


def test_lasing_thresholds_for_every_curve() -> None:
    """Test that a threshold entry is reported per curve and the lossy virtual laser still crosses."""
    # arrange
    cfg = load_config(CONFIGS / "laser_inversion.toml")
    laser = cfg.require("laser", cfg.laser).build()
    # act
    thresholds = lasing_thresholds(inversion_sweep(laser, cfg.require("sweep", cfg.sweep).values))
    # assert
    assert set(thresholds) == set(CURVES)
    assert len(thresholds["virtual_lossless"]) == 1
    assert thresholds["virtual_lossy"]
    assert all(1.2 < t_h < 50.0 for found in thresholds.values() for t_h in found)
