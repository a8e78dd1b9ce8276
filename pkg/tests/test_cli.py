import math

import numpy as np
import pytest

from qsmooth.cli import main
from qsmooth.config import ConfigError, ScenarioConfig, load_config, parse_config_text


def read_rows(path):
    lines = path.read_text().splitlines()
    header = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#")]
    return header, body[0].split(","), [list(map(float, b.split(","))) for b in body[1:]]


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nscenario = single\ntau = 2\ndt = 0.05  # inline\nduration=5\ninitial-bloch = 0, 0, 1\n")
    c = load_config(cfg, {"tau": 0.1, "seed": 3})
    assert (c.scenario, c.tau, c.dt, c.master_seed, c.initial_bloch) == ("single", 0.1, 0.05, 3, (0.0, 0.0, 1.0))
    assert c.steps == 100


@pytest.mark.parametrize(
    "values",
    [
        {"duration": "1", "dt": "0.03"},
        {"initial_bloch": "1,1,0"},
        {"scenario": "triple"},
        {"tau": "-1"},
        {"realizations": "0"},
        {"scenario": "dual", "tau": "1", "tau_x": "0.5"},
        {"scenario": "dual_sweep", "ratios": "5,5"},
        {"colour": "blue"},
        {"dt": "fast"},
    ],
)
def test_config_errors(values):
    with pytest.raises(ConfigError):
        load_config(None, values)


def test_parse_rejects_garbage():
    with pytest.raises(ConfigError):
        parse_config_text("scenario single")


def test_physical_units_convert_to_rabi_periods():
    c = ScenarioConfig(omega=math.pi, tau=4.0, dt=0.02, duration=10.0).in_rabi_units()
    assert (c.omega, c.tau, c.dt, c.duration) == pytest.approx((2 * math.pi, 2.0, 0.01, 5.0))


def test_single_trace(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["--scenario", "single", "--tau", "2", "--dt", "0.05", "--duration", "5", "--out", str(out)]) == 0
    header, cols, rows = read_rows(out)
    assert cols == ["t", "r", "z", "z_w", "z_c", "z_S", "flag"]
    assert len(rows) == 100
    assert "# tau = 2.0" in header
    a = np.array(rows)
    assert np.all(np.isfinite(a))
    np.testing.assert_allclose(a[:, 0], 0.05 * np.arange(1, 101))


def test_frozen_eigenstate_trace(tmp_path):
    out = tmp_path / "s.csv"
    main(["--scenario", "single", "--omega", "1e-300", "--tau", "0.1", "--dt", "0.01", "--duration", "1",
          "--initial-bloch", "0,0,1", "--out", str(out)])
    _, _, rows = read_rows(out)
    a = np.array(rows)
    np.testing.assert_allclose(a[:, [2, 5]], 1.0, atol=1e-12)


def test_ensemble_schema_and_summary(tmp_path):
    out = tmp_path / "e.csv"
    main(["--scenario", "ensemble", "--tau", "0.5", "--duration", "2", "--realizations", "17", "--out", str(out)])
    header, cols, rows = read_rows(out)
    assert cols == ["realization", "Q", "scaled_lnR", "anomalous"]
    assert [r[0] for r in rows] == list(range(17))
    assert "# size = 17" in header
    assert any(h.startswith("# frac_Q_pos = ") for h in header)


def test_dual_and_sweep_schema(tmp_path):
    out = tmp_path / "d.csv"
    main(["--scenario", "dual", "--tau", "0.1", "--duration", "1", "--realizations", "5", "--out", str(out)])
    _, cols, rows = read_rows(out)
    assert cols == ["realization", "Q_xZ", "Q_xSZ", "Q_xS"] and len(rows) == 5
    out = tmp_path / "w.csv"
    main(["--scenario", "dual_sweep", "--tau", "0.1", "--duration", "1", "--realizations", "4",
          "--ratios", "25,5,15", "--out", str(out)])
    _, cols, rows = read_rows(out)
    assert cols == ["ratio", "frac_xZ", "frac_xSZ", "frac_xS", "n"]
    assert [r[0] for r in rows] == [5, 15, 25] and all(r[4] == 4 for r in rows)


def test_bad_config_exit_code(capsys):
    assert main(["--scenario", "single", "--dt", "0.03", "--duration", "1"]) == 2
    assert "config error" in capsys.readouterr().err


def test_same_seed_same_bytes(tmp_path):
    args = ["--scenario", "single", "--tau", "0.1", "--dt", "0.05", "--duration", "3", "--seed", "5"]
    main(args + ["--out", str(tmp_path / "a.csv")])
    main(args + ["--out", str(tmp_path / "b.csv")])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
