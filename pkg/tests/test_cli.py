import json
import math

import pytest

from hardy_admit.cli import RunConfig, main, parse_domain, parse_profile
from hardy_admit.errors import ValidationError
from hardy_admit.profiles import PowerProfile, ShiftedPowerProfile


def run_json(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr().out
    return code, (json.loads(out) if code == 0 else None)


def test_classify_command(capsys):
    code, rep = run_json(capsys, "classify", "--N", "3", "--k", "3", "--p", "2", "--q", "2", "--domain", "full",
                         "--weight", "power:-2")
    assert code == 0 and rep["status"] == "admissible"
    assert any(b["theorem"].startswith("symmetrization") for b in rep["theorems_applied"])
    # the embedded config re-validates
    RunConfig.from_dict(rep["config"])


def test_solve_command(capsys, tmp_path):
    csv_path = tmp_path / "profile.csv"
    code, rep = run_json(capsys, "solve", "--N", "3", "--p", "2", "--q", "2", "--domain", "ball:1", "--weight",
                         "const:1", "--mesh", "2000", "--csv", str(csv_path))
    assert code == 0 and rep["lambda"] == pytest.approx(9.87, abs=0.01)
    assert csv_path.read_text().startswith("r,u")


def test_norms_command(capsys):
    code, rep = run_json(capsys, "norms", "--weight", "power:-1", "--N", "3", "--space", "lorentz:3,inf")
    assert code == 0 and rep["value"] == pytest.approx(2.41799, abs=1e-5)


def test_sweep_command(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("HARDY_ADMIT_THREADS", "2")
    csv_path = tmp_path / "sweep.csv"
    code, rep = run_json(capsys, "sweep", "--N", "3", "--p", "2", "--weight", "power:-2", "--sweep", "q:1,7,7",
                         "--csv", str(csv_path))
    assert code == 0 and rep["points"] == 7
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("q,status") and "excluded" in lines[-1]


def test_out_file_and_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("N = 3\np=2\nq=2\nweight=const:1\ndomain=ball:1\nmesh=500  # coarse\n")
    out = tmp_path / "rep.json"
    assert main(["solve", "--config", str(cfg), "--mesh", "200", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["config"]["mesh"] == 200


def test_deterministic(capsys):
    args = ["verify", "--N", "3", "--p", "2", "--q", "2", "--weight", "power:-2", "--sweep", "eps:0.05,0.5,20"]
    a = run_json(capsys, *args)[1]
    b = run_json(capsys, *args)[1]
    assert a == b


@pytest.mark.parametrize("args", [
    ["classify", "--p", "0.5"],
    ["classify", "--weight", "bogus:1"],
    ["classify", "--domain", "ball:1,2"],
    ["solve", "--domain", "product:2", "--N", "3"],
])
def test_invalid_input_exit_code(args, capsys):
    assert main(args) == 2


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour=blue\n")
    assert main(["classify", "--config", str(cfg)]) == 2


def test_numeric_failure_exit_code(monkeypatch):
    import hardy_admit.cli as cli
    from hardy_admit.errors import ConvergenceFailure

    def stalled(*args, **kwargs):
        raise ConvergenceFailure("stalled")

    monkeypatch.setattr(cli, "minimize_rayleigh", stalled)
    assert main(["solve", "--domain", "ball:1"]) == 3


def test_degenerate_inputs(capsys):
    assert main(["norms", "--weight", "indicator:0"]) == 2
    assert main(["solve", "--domain", "ball:1", "--weight", "const:0"]) == 2
    code, rep = run_json(capsys, "norms", "--weight", "const:0")
    assert code == 0 and rep["value"] == 0.0


def test_descriptors():
    assert parse_profile("power:-2") == PowerProfile(2.0)
    assert parse_profile("shifted_power:3,1") == ShiftedPowerProfile(3.0, 1.0)
    assert math.isinf(parse_domain("exterior:1", 3).b)
    with pytest.raises(ValidationError):
        parse_profile("power:1,2")
