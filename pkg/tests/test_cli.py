"""End-to-end tests of the command-line interface."""

import json
import math
import subprocess
import sys

from nmwaves.cli import main


def run_cli(*argv):
    return main(list(argv))


def test_analyze_example(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = run_cli("analyze", "--p", "365", "--tau", "0.07",
                   "--out", str(out))
    assert code == 0
    payload = json.loads(out.read_text())
    assert abs(payload["mu"] - 33.64) <= 0.01
    assert -0.055 <= payload["qbar2"] <= -0.045
    assert abs(payload["zeta"] - 6.46) <= 0.01
    assert abs(payload["lnp"] - math.log(365.0)) <= 1e-9
    assert payload["nm_verdict"] is True
    assert payload["heteroclinic"]["tail"] == "monotone_tail"
    assert "metadata" in payload
    manifest = json.loads((tmp_path / "report.json.manifest.json").read_text())
    assert str(out) in manifest["outputs"]


def test_analyze_monotone_case(tmp_path):
    out = tmp_path / "report.json"
    assert run_cli("analyze", "--p", "2", "--tau", "0.1",
                   "--out", str(out)) == 0
    payload = json.loads(out.read_text())
    assert payload["nm_verdict"] is False
    assert payload["heteroclinic"]["tail"] == "monotone_tail"
    assert payload["heteroclinic"]["crossings"] == 0


def test_analyze_with_speed(tmp_path):
    out = tmp_path / "report.json"
    assert run_cli("analyze", "--p", "365", "--tau", "0.07", "--c", "50",
                   "--out", str(out)) == 0
    payload = json.loads(out.read_text())
    assert abs(payload["c_star"] - 7.89) <= 0.01
    assert payload["tail_class"] == "eventually_monotone"
    assert payload["in_dm"] is True and payload["in_ds"] is True


def test_analyze_determinism(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    run_cli("analyze", "--p", "365", "--tau", "0.07", "--out", str(a))
    run_cli("analyze", "--p", "365", "--tau", "0.07", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_series_outputs(tmp_path):
    coeffs = tmp_path / "coeffs.csv"
    profile = tmp_path / "profile.csv"
    assert run_cli("series", "--p", "365", "--tau", "0.07", "--n", "10",
                   "--out", f"{coeffs},{profile}") == 0
    lines = coeffs.read_text().splitlines()
    assert lines[0] == "n,qbar_n"
    assert len(lines) == 11
    prof = profile.read_text().splitlines()
    assert prof[0] == "t,u2,u,u1"
    for row in prof[1:]:
        _, u2, u, u1 = (float(v) for v in row.split(","))
        assert u2 <= u <= u1


def test_heteroclinic_outputs(tmp_path):
    traj = tmp_path / "traj.csv"
    cross = tmp_path / "cross.json"
    assert run_cli("heteroclinic", "--p", "365", "--tau", "0.07",
                   "--t-end", "2.0", "--out", f"{traj},{cross}") == 0
    payload = json.loads(cross.read_text())
    assert payload["tail_class"] == "monotone_tail"
    assert payload["global_max"] > 6.46
    assert payload["anomalies"] == []


def test_boundaries_output(tmp_path):
    out = tmp_path / "curves.csv"
    assert run_cli("boundaries", "--P", "4.8999", "--c", "1:1000:8",
                   "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "c,T_of_c,tau_of_c,tau_hat,T_star"
    last = [float(v) for v in lines[-1].split(",")]
    assert abs(last[1] - last[4]) <= 1e-3  # T(c) -> T* at large c
    assert abs(last[2] - last[3]) <= 1e-3  # tau(c) -> tau_hat


def test_atlas_output(tmp_path):
    out = tmp_path / "map.csv"
    assert run_cli("atlas", "--tau", "0.06:0.08:3", "--p", "365:465:3",
                   "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "tau,lnlnp,flag"
    assert len(lines) == 10
    flags = {}
    for row in lines[1:]:
        tau, lnlnp, flag = row.split(",")
        flags[(float(tau), float(lnlnp))] = int(flag)
    key = (0.07, math.log(math.log(365.0)))
    hit = [v for (t, ll), v in flags.items()
           if abs(t - 0.07) < 1e-12 and abs(ll - key[1]) < 1e-9]
    assert hit == [1]


def test_simulate_and_diagnose_roundtrip(tmp_path):
    snaps = tmp_path / "snaps.csv"
    front = tmp_path / "front.csv"
    meta = tmp_path / "meta.json"
    cfg = {
        "p": 365.0, "tau": 0.07, "x_lo": -40.0, "x_hi": 40.0,
        "dx": 0.25, "dt": 0.01, "t_end": 0.6,
        "scheme": "crank_nicolson",
        "ic": {"kind": "exp_tail", "beta": 0.7, "cap": math.log(365.0)},
        "bc": {"u_lo": 0.0, "u_hi": math.log(365.0)},
        "snapshot_times": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
    }
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    assert run_cli("simulate", "--config", str(cfg_path),
                   "--out", f"{snaps},{front},{meta}") == 0
    assert json.loads(meta.read_text())["delay_steps"] == 7

    diag = tmp_path / "diag.json"
    assert run_cli("diagnose", "--in", str(snaps), "--p", "365",
                   "--tau", "0.07", "--front", str(front),
                   "--out", str(diag)) == 0
    payload = json.loads(diag.read_text())
    assert payload["direction"] == -1
    assert payload["speed"] > 20.0


def test_simulate_preset_path(tmp_path):
    snaps = tmp_path / "s.csv"
    front = tmp_path / "f.csv"
    meta = tmp_path / "m.json"
    assert run_cli("simulate", "--preset", "fast-front-smoke",
                   "--out", f"{snaps},{front},{meta}") == 0
    manifest = json.loads((tmp_path / "s.csv.manifest.json").read_text())
    assert set(manifest["outputs"]) == {str(snaps), str(front), str(meta)}
    payload = json.loads(meta.read_text())
    assert payload["config"]["label"] == "fast-front-smoke"


def test_simulate_requires_one_source(tmp_path):
    code = run_cli("simulate", "--out", "a,b,c")
    assert code == 1


def test_verify_series_suite():
    assert run_cli("verify", "--suite", "series") == 0


def test_simulate_byte_determinism(tmp_path):
    outs = []
    for tag in ("a", "b"):
        snaps = tmp_path / f"{tag}.csv"
        front = tmp_path / f"{tag}_front.csv"
        meta = tmp_path / f"{tag}_meta.json"
        assert run_cli("simulate", "--preset", "fast-front-smoke",
                       "--out", f"{snaps},{front},{meta}") == 0
        outs.append((snaps.read_bytes(), front.read_bytes(),
                     meta.read_bytes()))
    assert outs[0] == outs[1]


def test_verify_model_suite(tmp_path):
    out = tmp_path / "margins.csv"
    assert run_cli("verify", "--suite", "model", "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "check,margin,threshold,status"
    assert all(row.endswith("pass") for row in lines[1:])


def test_analyze_no_delay(tmp_path):
    out = tmp_path / "r.json"
    assert run_cli("analyze", "--p", "365", "--tau", "0", "--out",
                   str(out)) == 0
    payload = json.loads(out.read_text())
    assert payload["nm_verdict"] is False
    assert payload["heteroclinic"] is None
    # zeta reduces to 1 + qbar2 without a delay
    assert abs(payload["zeta"] - (1.0 + payload["qbar2"])) <= 1e-12


def test_analyze_small_amplitude_with_speed(tmp_path):
    out = tmp_path / "r.json"
    assert run_cli("analyze", "--p", "1.5", "--tau", "0.3", "--c", "2",
                   "--out", str(out)) == 0
    payload = json.loads(out.read_text())
    assert payload["nm_verdict"] is False
    assert payload["in_dm"] is True  # P < 0: always a negative root
    assert payload["in_ds"] is True


def test_domain_error_exit_code():
    assert run_cli("analyze", "--p", "0.5", "--tau", "0.1") == 1


def test_usage_exit_code():
    proc = subprocess.run(
        [sys.executable, "-m", "nmwaves.cli", "--bogus"],
        capture_output=True)
    assert proc.returncode == 64
    proc = subprocess.run(
        [sys.executable, "-m", "nmwaves.cli", "nosuchcommand"],
        capture_output=True)
    assert proc.returncode == 64


def test_threads_env_override(tmp_path, monkeypatch):
    from nmwaves.util import resolve_threads

    monkeypatch.setenv("NW_THREADS", "3")
    assert resolve_threads(8) == 3
    monkeypatch.delenv("NW_THREADS")
    assert resolve_threads(8) == 8
    assert resolve_threads(None) >= 1
