import json
import math
import os
import subprocess
import sys

import pytest
from click.testing import CliRunner

from diracshift import cli
from diracshift import shifts as sh
from diracshift.errors import SingularMatching

HEADER = "phi_in_deg,phi_r_deg,phi_t_deg,dz_r_lambdaC,dz_t_lambdaC,R,T,flags"


def run(*args):
    return CliRunner().invoke(cli.main, list(args), catch_exceptions=False)


def rows(text):
    lines = text.split("\n")
    assert lines[-1] == ""
    return [line.split(",") for line in lines[1:-1]]


# -- sweep ------------------------------------------------------------------


def test_sweep_defaults():
    res = run("sweep")
    assert res.exit_code == 0
    assert res.output.split("\n")[0] == HEADER
    assert "\r" not in res.output
    table = rows(res.output)
    assert [r[0] for r in table] == [f"{d:.2f}" for d in range(0, 65, 2)]
    assert table[15][3] == "0.0000"  # 30 degrees
    assert table[30][3] == "0.0592"  # 60 degrees
    assert all(not r[3].startswith("-0.0000") for r in table)
    assert all(len(r[5].split(".")[1]) == 12 for r in table)


def test_sweep_evanescent_rows():
    table = rows(run("sweep", "--angles", "63,66,80").output)
    assert table[0][7] == ""
    for r in table[1:]:
        assert r[2] == r[3] == r[4] == ""
        assert r[5] == "1.000000000000" and r[6] == "0.000000000000"
        assert r[7] == "evanescent"


def test_sweep_without_barrier():
    for r in rows(run("sweep", "--barrier", "0").output):
        assert r[3] == "0.0000"
        assert float(r[5]) == 0.0 and float(r[6]) == 1.0


def test_sweep_json_and_file(tmp_path):
    out = tmp_path / "s.json"
    res = run("sweep", "--format", "json", "--out", str(out), "--phi-stop", "4")
    assert res.exit_code == 0 and res.output == ""
    data = json.loads(out.read_text())
    assert [r["phi_in_deg"] for r in data["rows"]] == [0.0, 2.0, 4.0]
    assert data["header"] == HEADER.split(",")


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"energy": 5.0, "barrier": 0.5, "phi_stop": 10, "bloch": "90,90"}))
    a = run("sweep", "--config", str(cfg))
    b = run("sweep", "--energy", "5", "--barrier", "0.5", "--phi-stop", "10", "--tau", "0,1,0")
    assert a.output == b.output
    c = run("sweep", "--config", str(cfg), "--barrier", "0.25")
    assert c.output != a.output
    assert c.output == run("sweep", "--energy", "5", "--phi-stop", "10", "--tau", "0,1,0").output


def test_bloch_and_tau_are_equivalent():
    assert run("sweep", "--bloch", "90,90").output == run("sweep", "--tau", "0,1,0").output


def test_determinism_across_runs_and_threads():
    outs = []
    for threads in ("1", "4"):
        env = dict(os.environ, OMP_NUM_THREADS=threads, OPENBLAS_NUM_THREADS=threads)
        proc = subprocess.run(
            [sys.executable, "-m", "diracshift", "sweep", "--angles", "0,15,30,45,60"],
            env=env,
            capture_output=True,
            check=True,
        )
        outs.append(proc.stdout)
    assert outs[0] == outs[1]
    assert run("sweep").output == run("sweep").output


@pytest.mark.parametrize(
    "args",
    [
        ["sweep", "--energy", "0.5"],
        ["sweep", "--barrier", "4"],
        ["sweep", "--tau", "1,1,1"],
        ["sweep", "--tau", "0,1"],
        ["sweep", "--tau", "0,1,0", "--bloch", "90,90"],
        ["sweep", "--phi-step", "0"],
        ["sweep", "--angles", "95"],
        ["sweep", "--config", "/nonexistent/run.json"],
        ["shifts", "--phi", "70"],
        ["trajectory", "--steps", "10"],
        ["sweep", "--format", "xml"],
    ],
)
def test_configuration_errors_exit_2(args):
    res = CliRunner().invoke(cli.main, args)
    assert res.exit_code == 2


def test_bad_config_values_exit_2(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"energy": "lots"}))
    assert CliRunner().invoke(cli.main, ["sweep", "--config", str(cfg)]).exit_code == 2
    cfg.write_text("[1, 2]")
    assert CliRunner().invoke(cli.main, ["sweep", "--config", str(cfg)]).exit_code == 2


def test_numerical_errors_exit_3(monkeypatch):
    def boom(cfg):
        raise SingularMatching("matching matrix is singular")

    monkeypatch.setattr(cli, "coeffs_record", boom)
    res = CliRunner().invoke(cli.main, ["coeffs"])
    assert res.exit_code == 3
    assert "numerical error" in res.output


def test_help_carries_transmitted_note():
    text = " ".join(run("sweep", "--help").output.split())
    assert "internally inconsistent" in text


# -- single-angle commands --------------------------------------------------


def test_coeffs_spin_y():
    data = json.loads(run("coeffs", "--phi", "30", "--tau", "0,1,0").output)
    a = complex(data["A"]["re"], data["A"]["im"])
    b = complex(data["B"]["re"], data["B"]["im"])
    assert abs(b - 1j * a) < 1e-12
    assert data["R"] + data["T"] == pytest.approx(1, abs=1e-12)
    assert data["phi_t_deg"] == pytest.approx(33.51, abs=0.005)


def test_coeffs_evanescent_and_no_barrier():
    data = json.loads(run("coeffs", "--phi", "70").output)
    assert data["channel"] == "evanescent" and data["R"] == 1.0 and data["T"] == 0.0
    data = json.loads(run("coeffs", "--barrier", "0").output)
    assert abs(complex(data["A"]["re"], data["A"]["im"])) < 1e-15
    assert abs(complex(data["B"]["re"], data["B"]["im"])) < 1e-15


def test_shifts_working_point():
    data = json.loads(run("shifts").output)
    dz = data["reflected"]["dz"]
    assert round(dz["analytic"], 4) == 0.0592
    assert dz["rel_discrepancy"] <= 1e-6
    assert data["transmitted"]["dz"]["rel_discrepancy"] <= 1e-6


def test_shifts_at_second_critical_angle():
    dz = json.loads(run("shifts", "--phi", "30").output)["reflected"]["dz"]
    assert abs(dz["analytic"]) < 1e-12
    assert dz["rel_discrepancy"] is None


def test_shifts_without_spin_y():
    data = json.loads(run("shifts", "--tau", "0,0,1").output)
    for which in ("reflected", "transmitted"):
        assert abs(data[which]["dz"]["analytic"]) < 1e-15
        assert abs(data[which]["dz"]["fd"]) < 1e-12


def test_wavepacket_command():
    res = run("wavepacket", "--tau", "0,1,0", "--kza", "50,100,200")
    data = json.loads(res.output)
    errs = [r["rel_error"] for r in data["runs"]]
    assert errs[0] > errs[1] > errs[2] and errs[2] < 0.05


def test_wavepacket_without_barrier_or_spin_y():
    data = json.loads(run("wavepacket", "--barrier", "0", "--kza", "100", "--nodes", "4096", "--samples", "2048").output)
    assert data["runs"][0]["reflected_mass"] < 1e-20
    assert data["runs"][0]["measured"] is None
    data = json.loads(run("wavepacket", "--tau", "0,0,1", "--kza", "100", "--nodes", "4096", "--samples", "2048").output)
    assert abs(data["runs"][0]["measured"]) < 1e-6


def test_trajectory_command():
    data = json.loads(run("trajectory").output)
    assert abs(data["integrated"]["dz"]) == pytest.approx(0.0233, abs=2e-4)
    assert data["closed_form"] == pytest.approx(0.0233, abs=2e-4)
    assert data["rel_gap"] <= 0.01
    zero = json.loads(run("trajectory", "--x-max", "0").output)
    assert zero["integrated"]["magnitude"] == 0.0


def test_trajectory_gap_halves_with_steps():
    gaps = [json.loads(run("trajectory", "--steps", str(n)).output)["rel_gap"] for n in (1000, 2000, 4000)]
    assert gaps[0] / gaps[1] >= 2 and gaps[1] / gaps[2] >= 2


# -- verify ---------------------------------------------------------------------


def test_verify_passes_and_is_deterministic():
    a = run("verify")
    b = run("verify")
    assert a.exit_code == 0
    assert a.output == b.output
    assert "shifts.spin_flip_antisymmetry" in a.output


def test_verify_catches_sign_error_in_reflected_phase(monkeypatch):
    original = sh.theta_reflected

    def mutated(cfg, kz, branch="a"):
        val = original(cfg, kz, branch)
        return -val if branch == "a" else val

    monkeypatch.setattr(sh, "theta_reflected", mutated)
    res = CliRunner().invoke(cli.main, ["verify"])
    assert res.exit_code == 1
    line = next(ln for ln in res.output.splitlines() if ln.startswith("shifts.spin_flip_antisymmetry"))
    assert "FAIL" in line
