import csv
from pathlib import Path

import pytest

from modules.cli import EXIT_CONFIG, EXIT_OK, main
from modules.config import load_config
from modules.experiments import run_experiment, summary_path
from modules.laser import SWEEP_COLUMNS

CONFIGS = Path(__file__).parents[1] / "configs"
QUTRIT_MODEL_CONFIGS = {
    "gkls_coupling_sweep",
    "gkls_temperature_sweep",
    "qutrit_evolution",
    "reset_coupling_sweep",
    "reset_temperature_sweep",
}


def _header(path: Path) -> list[str]:
    with path.open(newline="", encoding="utf-8") as f:
        return next(csv.reader(f))


def _run(experiment: str, config: str, output: Path, *extra: str) -> int:
    return main([experiment, "--config", str(CONFIGS / config), "--output", str(output), *extra])


def test_virtual_temp_is_reproducible(tmp_path: Path) -> None:
    """Test that rerunning an experiment writes a byte-identical CSV and a summary."""
    # arrange
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    # act
    codes = (
        _run("virtual-temp", "virtual_temperatures.toml", first),
        _run("virtual-temp", "virtual_temperatures.toml", second, "--jobs", "2"),
    )
    # assert
    assert codes == (EXIT_OK, EXIT_OK)
    assert first.read_bytes() == second.read_bytes()
    assert summary_path(first).exists()
    assert _header(first)[:3] == ["T_h", "pair", "omega1"]
    assert len(first.read_text(encoding="utf-8").splitlines()) == 1 + 4 * 3


def test_effrme_steady_state_methods(tmp_path: Path) -> None:
    """Test that the four-level reset equation is solved three ways with the same answer."""
    # arrange
    output = tmp_path / "steady.csv"
    # act
    code = _run("steady-state", "effrme_steady_state.toml", output)
    # assert
    assert code == EXIT_OK
    with output.open(newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert [row["method"] for row in rows] == ["cramer", "cofactor", "closed_form"]
    for level in ("p0", "p1", "p2", "p3"):
        values = [float(row[level]) for row in rows]
        assert max(values) - min(values) < 1e-10


def test_laser_sweep_columns(tmp_path: Path) -> None:
    """Test the laser table header and the findings recorded in the summary."""
    # arrange
    output = tmp_path / "laser.csv"
    # act
    code = _run("laser-sweep", "laser_inversion.toml", output, "--jobs", "3")
    # assert
    assert code == EXIT_OK
    assert _header(output) == list(SWEEP_COLUMNS)
    summary = summary_path(output).read_text(encoding="utf-8")
    assert "inversion_threshold_T_h" in summary
    assert "lasing_thresholds" in summary


def test_fit_rates_on_effrme(tmp_path: Path) -> None:
    """Test that the bundled effRME fit recovers its own ratios."""
    # arrange
    output = tmp_path / "fit.csv"
    # act
    code = _run("fit-rates", "effrme_fit.toml", output)
    # assert
    assert code == EXIT_OK
    with output.open(newline="", encoding="utf-8") as f:
        (row,) = list(csv.DictReader(f))
    assert float(row["qA_over_qB"]) == pytest.approx(0.6 / 1.8, rel=1e-2)
    assert float(row["qB_over_qC"]) == pytest.approx(1.8 / 0.9, rel=1e-2)


def test_missing_field_exits_with_config_error(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Test that a config without energies exits with status 2 and names the field."""
    # arrange
    config = tmp_path / "broken.toml"
    config.write_text('experiment = "virtual-temp"\n\n[model]\nmachines = []\n', encoding="utf-8")
    output = tmp_path / "out.csv"
    # act
    code = main(["virtual-temp", "--config", str(config), "--output", str(output)])
    # assert
    assert code == EXIT_CONFIG
    assert "missing field: energies" in capsys.readouterr().err
    assert not output.exists()


def test_missing_section_exits_with_config_error(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Test that running the laser sweep on a model-only config names the missing section."""
    # act
    code = _run("laser-sweep", "virtual_temperatures.toml", tmp_path / "out.csv")
    # assert
    assert code == EXIT_CONFIG
    assert "missing field: laser" in capsys.readouterr().err


def test_jobs_must_be_positive(tmp_path: Path) -> None:
    """Test that zero worker threads is a usage error."""
    # act / assert
    assert _run("virtual-temp", "virtual_temperatures.toml", tmp_path / "out.csv", "--jobs", "0") == EXIT_CONFIG


def test_unknown_experiment_is_rejected_by_parser() -> None:
    """Test that argparse refuses an experiment outside the known set."""
    # act / assert
    with pytest.raises(SystemExit) as info:
        main(["teleport", "--config", str(CONFIGS / "virtual_temperatures.toml")])
    assert info.value.code == EXIT_CONFIG


def test_failed_sweep_point_is_recorded(tmp_path: Path) -> None:
    """Test that an uncoupled sweep point is reported in its row while the other points are still solved."""
    # arrange
    text = (CONFIGS / "qubit_steady_state.toml").read_text(encoding="utf-8")
    model, _ = text.split("[model.env]")
    config = tmp_path / "uncoupled.toml"
    config.write_text(model + '[sweep]\nvariable = "g_A"\nvalues = [0.0, 0.5]\n', encoding="utf-8")
    output = tmp_path / "steady.csv"
    # act
    code = main(["steady-state", "--config", str(config), "--output", str(output)])
    # assert
    assert code == EXIT_OK
    with output.open(newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert "non-unique steady state" in rows[0]["error"]
    assert rows[1]["error"] == ""
    assert float(rows[1]["p0"]) + float(rows[1]["p1"]) == pytest.approx(1.0, abs=1e-9)
    assert "failed_points = 1" in summary_path(output).read_text(encoding="utf-8")


@pytest.mark.parametrize(
    "path",
    [
        pytest.param(path, id=path.stem, marks=[pytest.mark.slow] if path.stem in QUTRIT_MODEL_CONFIGS else [])
        for path in sorted(CONFIGS.glob("*.toml"))
    ],
)
def test_bundled_config_runs(path: Path, tmp_path: Path) -> None:
    """Test that every bundled experiment runs to a non-empty table with no failed points."""
    # arrange
    cfg = load_config(path)
    # act
    output = run_experiment(cfg, output=tmp_path / f"{path.stem}.csv", jobs=2)
    # assert
    with output.open(newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert rows
    assert all(not row.get("error") for row in rows)
    assert summary_path(output).exists()
