import json
import math
import subprocess
import sys

import pytest

from xyfamily import cli


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    rc = cli.main([*argv, "--out", str(out), "--quiet"])
    return rc, out


def test_decompose_check(tmp_path, capsys):
    rc = cli.main(["decompose", "--theta", "1.5708", "--beta", "0", "--check", "--out", str(tmp_path)])
    assert rc == 0
    res = json.loads(capsys.readouterr().out)
    assert res["distance"] < 1e-10
    assert len(res["program"]["steps"]) == 4


def test_ramsey_fitted_frequency(tmp_path):
    rc, out = run(tmp_path, "ramsey", "--frame-freq-mhz", "40", "--seed", "1")
    assert rc == 0
    res = json.loads((out / "ramsey.json").read_text())
    assert math.isclose(res["fitted_frequency_hz"], 857.76e6, rel_tol=1e-6)


@pytest.mark.parametrize("graph,gateset,expect", [
    ("ring4", "cz", {"CZ": 10}), ("ring4", "cz_xy", {"CZ": 6, "XY": 2}),
    ("k4", "cz", {"CZ": 17}), ("k4", "cz_xy", {"CZ": 7, "XY": 5}),
])
def test_qaoa_counts(tmp_path, capsys, graph, gateset, expect):
    rc = cli.main(["qaoa", "counts", "--graph", graph, "--gateset", gateset, "--out", str(tmp_path)])
    assert rc == 0
    assert json.loads(capsys.readouterr().out) == expect


def test_seed_is_generated_and_recorded(tmp_path):
    rc, out = run(tmp_path, "counts")
    man = json.loads((out / "manifest.json").read_text())
    assert rc == 0 and isinstance(man["seed"], int)
    assert man["command"] == "counts" and man["outputs"] == ["counts.json"]


def test_outputs_are_deterministic_and_jobs_independent(tmp_path):
    args = ["chevron", "--model", "sideband", "--fp-points", "5", "--duration-points", "20", "--seed", "3"]
    _, a = run(tmp_path, *args, name="a")
    _, b = run(tmp_path, *args, "--jobs", "2", name="b")
    for f in ("chevron.csv", "chevron.json"):
        assert (a / f).read_bytes() == (b / f).read_bytes()


def test_qaoa_landscape_shot_mode_reproducible(tmp_path):
    args = ["qaoa", "--graph", "ring4", "--gamma-points", "4", "--beta-points", "3", "--shots", "100", "--seed", "5"]
    _, a = run(tmp_path, *args, name="a")
    _, b = run(tmp_path, *args, name="b")
    assert (a / "landscape.csv").read_bytes() == (b / "landscape.csv").read_bytes()
    assert (a / "qaoa.json").read_bytes() == (b / "qaoa.json").read_bytes()
    assert (a / "compiled.txt").exists()


def test_calibrate_sim_noiseless(tmp_path):
    rc, out = run(tmp_path, "calibrate-sim", "--seed", "4")
    res = json.loads((out / "calibration.json").read_text())
    assert rc == 0 and res["residual"] < 1e-10
    assert (out / "sweep_phi0.csv").exists()


def test_irb_small_run(tmp_path):
    rc, out = run(tmp_path, "irb", "--noise", "none", "--inject-fidelity", "0.97", "--clifford-fidelity", "0.99",
                  "--lengths", "1,2,4,8", "--randomizations", "4", "--shots", "0", "--seed", "2")
    res = json.loads((out / "irb.json").read_text())
    assert rc == 0 and abs(res["fidelity"] - 0.97) < 1e-6
    assert (out / "irb_survival.csv").read_text().count("\n") == 1 + 2 * 4 * 4


def test_verify_saved_program(tmp_path):
    run(tmp_path, "decompose", "--gate", "cphase", "--theta", "0.7", name="d")
    rc, out = run(tmp_path, "verify", "--program", str(tmp_path / "d" / "program.json"), "--gate", "cphase",
                  "--theta", "0.7", name="v")
    res = json.loads((out / "verify.json").read_text())
    assert rc == 0 and res["distance"] < 1e-10


def test_domain_error_exit_code(tmp_path, capsys):
    rc, _ = run(tmp_path, "verify", "--program", str(tmp_path / "missing.json"))
    assert rc == 1
    assert "--program" in capsys.readouterr().err


def test_bad_profile_names_flag(tmp_path, capsys):
    rc, _ = run(tmp_path, "chevron", "--profile", str(tmp_path / "nope.json"))
    assert rc == 1
    assert "--profile" in capsys.readouterr().err


def test_usage_errors_exit_2(tmp_path):
    with pytest.raises(SystemExit) as e:
        cli.main(["irb", "--shots", "-3"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["chevron", "--fp-min-mhz", "260", "--fp-max-mhz", "250", "--out", str(tmp_path)])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["nonsense"])
    assert e.value.code == 2


def test_profile_env_variable(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.PROFILE_ENV, "half-flux")
    rc, out = run(tmp_path, "chevron", "--model", "sideband", "--fp-points", "3", "--duration-points", "5")
    man = json.loads((out / "manifest.json").read_text())
    from xyfamily.pulsesim import half_flux_profile

    assert rc == 0 and man["profile_hash"] == half_flux_profile().hash


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "xyfamily.cli", "counts", "--graph", "k4", "--out", str(tmp_path)],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout) == {"CZ": 17}
