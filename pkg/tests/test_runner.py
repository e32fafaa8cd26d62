import json
import math
from pathlib import Path

import numpy as np
import pytest

from crestfactor.cli import main
from crestfactor.config import ScenarioError, from_mapping, parse_config, validate
from crestfactor.errors import DomainError
from crestfactor.runner import _Outputs, load_record, render_outputs, run_scenario
from crestfactor.crest import CrestSeries

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

HEAT = {"name": "heat-min", "equation": "heat", "checks": ["classify"],
        "domain": {"kind": "dirichlet", "N": 32}, "physics": {"k": 1.0},
        "initial": {"preset": "modes", "modes": [[2, 1.0]]}, "time": {"T": 0.5, "dt": 0.01}}


def _nse(**forcing):
    return {"name": "nse", "equation": "nse2d", "checks": ["bound_2d"], "domain": {"d": 2, "N": 16},
            "physics": {"nu": 0.05}, "initial": {"preset": "random", "amplitude": 0.01},
            "forcing": forcing, "time": {"T": 0.2, "dt": 0.01}}


def test_minimal_heat(tmp_path):
    s = from_mapping(HEAT)
    validate(s)
    r = run_scenario(s, tmp_path / "h")
    assert r.status == 0
    assert r.verification["constant_holds"]
    assert set(r.files) >= {"crest.csv", "verification.json", "manifest.json"}
    man = json.loads((tmp_path / "h" / "manifest.json").read_text())
    assert man["seed"] == 0 and "manifest.json" in man["files"]


def test_unknown_key_reported():
    bad = dict(HEAT, physics={"k": 1.0, "viscosity": 2})
    with pytest.raises(ScenarioError) as ei:
        validate(from_mapping(bad))
    assert any("physics.viscosity" in e for e in ei.value.errors)


def test_scalar_forcing_amplitude_reported():
    with pytest.raises(ScenarioError) as ei:
        validate(from_mapping(_nse(type="modes", modes=[{"k": [1, 0], "amplitude": 1.0}])))
    assert any("two components" in e for e in ei.value.errors)


def test_zero_mean_forcing_rejected():
    with pytest.raises(ScenarioError) as ei:
        validate(from_mapping(_nse(type="modes", modes=[{"k": [0, 0], "amplitude": [1.0, 0.0]}])))
    assert any("zero wavevector" in e for e in ei.value.errors)


def test_proviso_rejected():
    with pytest.raises(ScenarioError) as ei:
        validate(from_mapping(_nse(type="kolmogorov", k0=1, amplitude=1e-9)))
    assert any("proviso" in e for e in ei.value.errors)


def test_rerun_is_byte_identical(tmp_path):
    s = from_mapping(_nse(type="kolmogorov", k0=1, amplitude=0.1))
    run_scenario(s, tmp_path / "a")
    run_scenario(s, tmp_path / "b")
    for name in ("crest.csv", "ledger.csv", "diagnostics.csv", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    seeded = run_scenario(s.with_overrides(seed=7), tmp_path / "c")
    assert (tmp_path / "c" / "crest.csv").read_bytes() != (tmp_path / "a" / "crest.csv").read_bytes()
    assert seeded.status == 0


def test_reload_and_verify(tmp_path):
    s = from_mapping(_nse(type="kolmogorov", k0=1, amplitude=0.1))
    run_scenario(s, tmp_path / "a")
    rec = load_record(tmp_path / "a")
    assert rec.equation == "nse2d" and len(rec.ledger) > 0
    assert main(["verify", str(tmp_path / "a")]) == 0


def test_empty_trajectory_writes_nothing(tmp_path):
    s = from_mapping(HEAT)
    out = _Outputs(crest=CrestSeries(), verification={})
    with pytest.raises(DomainError):
        render_outputs(s, out)
    assert not any(tmp_path.iterdir())


def test_crest_header(tmp_path):
    run_scenario(from_mapping(HEAT), tmp_path / "h")
    head = (tmp_path / "h" / "crest.csv").read_text().splitlines()[0]
    assert head == "t,variant,sup_norm,denom,C_f"


def test_stokes2_period(tmp_path):
    r = run_scenario(parse_config(CONFIGS / "stokes2.toml"), tmp_path / "s")
    assert r.classification["verdict"] == "periodic_or_quasiperiodic"
    assert r.classification["stats"]["dominant_period"] == pytest.approx(math.pi / 2, rel=5e-3)


def test_burgers_config(tmp_path):
    r = run_scenario(parse_config(CONFIGS / "burgers.toml"), tmp_path / "b")
    assert r.classification["verdict"] == "decaying"
    assert r.verification["asymptote_within_1pct"]


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.toml")), ids=lambda p: p.stem)
def test_shipped_configs_validate(path):
    validate(parse_config(path))


def test_cli_run_and_classify(tmp_path, capsys):
    cfg = tmp_path / "heat.json"
    cfg.write_text(json.dumps(dict(HEAT, time={"T": 5.0, "dt": 0.01})))
    assert main(["run", str(cfg), "--output", str(tmp_path / "runs")]) == 0
    assert main(["classify", str(tmp_path / "runs" / "heat-min" / "crest.csv")]) == 0
    assert "steady" in capsys.readouterr().out


def test_cli_config_error_exit(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(dict(HEAT, equation="maxwell")))
    assert main(["run", str(cfg)]) == 2


def test_cli_oracle(capsys):
    assert main(["oracle", "stokes2", "--params", "U0=1", "Omega0=2", "nu=1"]) == 0
    assert capsys.readouterr().out.strip()


def test_cli_calibrate(tmp_path, capsys):
    assert main(["calibrate-gni", "1", "1", str(2 * math.pi), "16", "--samples", "200",
                 "--cache", str(tmp_path / "gni.json")]) == 0
    assert (tmp_path / "gni.json").exists()
