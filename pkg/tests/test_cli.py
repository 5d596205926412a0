import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import model_params, truth_freqs, truth_model
from test_metrics import soft_compression
from sawkit import cli
from sawkit.devices import REPORTED_DEVICES
from sawkit.mbvd import MbvdModel, admittance
from sawkit.network import y_to_s
from sawkit.touchstone import FrequencySweep, read_s1p, write_s1p


@pytest.fixture
def truth_s1p(tmp_path):
    path = tmp_path / "dev.s1p"
    write_s1p(path, y_to_s(admittance(truth_model(), truth_freqs())))
    return path


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_sorted_and_echo(tmp_path, capsys):
    for name in ("b.s1p", "a.s1p"):
        write_s1p(tmp_path / name, FrequencySweep([1e9, 2e9], [0.1, 0.2j]))
    code, out, _ = run(["parse", tmp_path / "b.s1p", tmp_path / "a.s1p"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith(str(tmp_path / "a.s1p")) and "2 points" in lines[0]
    code, out, _ = run(["parse", "--echo", "--format", "MA", tmp_path / "a.s1p"], capsys)
    assert "# HZ S MA R 50" in out


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.s1p"
    bad.write_text("# GHz S RI R 50\n1 0.1\n")
    code, _, err = run(["parse", bad], capsys)
    assert code == 2
    assert "line 2" in err
    assert run(["parse", tmp_path / "missing.s1p"], capsys)[0] == 2


def test_singular_conversion_exit_code(tmp_path, capsys):
    p = tmp_path / "short.s1p"
    write_s1p(p, FrequencySweep([1e9, 2e9], [-1.0, 0.0]))
    assert run(["y", p], capsys)[0] == 3


def test_y_and_bodeq_csv(truth_s1p, tmp_path, capsys):
    out_y = tmp_path / "y.csv"
    assert run(["y", truth_s1p, "--csv", out_y], capsys)[0] == 0
    data = np.loadtxt(out_y, delimiter=",", skiprows=1)
    assert data.shape == (2001, 3)
    np.testing.assert_allclose(data[:, 1], admittance(truth_model(), truth_freqs()).conductance, rtol=1e-9, atol=1e-15)
    out_q = tmp_path / "q.csv"
    assert run(["bodeq", truth_s1p, "--csv", out_q], capsys)[0] == 0
    assert out_q.read_text().startswith("freq_hz,bode_q\n")


def test_fit_report_and_model(truth_s1p, tmp_path, capsys):
    report = tmp_path / "rep.json"
    model_out = tmp_path / "model.json"
    design = tmp_path / "design.json"
    design.write_text(json.dumps({"name": "D", "lambda_nm": 600, "h_ln_over_lambda": 0.833, "aperture_lambdas": 20, "n_e": 80, "n_r": 40}))
    argv = ["fit", truth_s1p, "--branches", "2", "--report", report, "--model-out", model_out, "--design", design]
    code, out, _ = run(argv, capsys)
    assert code == 0
    doc = json.loads(report.read_text())
    assert set(doc) == {"design", "fit_result", "metrics", "curves"}
    assert doc["design"]["name"] == "D"
    assert doc["fit_result"]["converged"] is True
    assert (tmp_path / doc["curves"]["conductance"]).exists()
    assert (tmp_path / doc["curves"]["bode_q"]).exists()
    m = MbvdModel.from_json(model_out.read_text())
    truth = truth_model().canonical()
    np.testing.assert_allclose(model_params(m.canonical()), model_params(truth), rtol=1e-6)
    # byte-identical on re-run, no timestamp by default
    first = report.read_text()
    run(argv, capsys)
    assert report.read_text() == first
    run(argv + ["--timestamp"], capsys)
    assert "timestamp" in json.loads(report.read_text())


def test_fit_config_and_flag_override(truth_s1p, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"branch_count": 1, "weight_mode": "uniform"}))
    code, out, _ = run(["fit", truth_s1p, "--config", cfg], capsys)
    assert len(json.loads(out)["branches"]) == 1
    code, out, _ = run(["fit", truth_s1p, "--config", cfg, "--branches", "2"], capsys)
    assert len(json.loads(out)["branches"]) == 2
    cfg.write_text(json.dumps({"weight_mode": "bogus"}))
    assert run(["fit", truth_s1p, "--config", cfg], capsys)[0] == 2


def test_fit_then_metrics_round_trip(tmp_path, capsys):
    model = tmp_path / "m.json"
    s1p = tmp_path / "m.s1p"
    args = ["synth", "--fs", 6.531e9, "--kt2", 0.22, "--c0", 330e-15, "--q", 565, "--rs", 1.0, "--r0", 0.5, "--out", model, "--s1p", s1p]
    assert run(args, capsys)[0] == 0
    code, out, _ = run(["fit", s1p, "--model-out", tmp_path / "fitted.json"], capsys)
    assert code == 0
    fitted = MbvdModel.from_json((tmp_path / "fitted.json").read_text())
    np.testing.assert_allclose(model_params(fitted), model_params(MbvdModel.from_json(model.read_text())), rtol=1e-6)
    code, out, _ = run(["metrics", s1p], capsys)
    assert code == 0
    m = json.loads(out)
    assert m["f_s"] == pytest.approx(6.531e9, rel=1e-4)
    assert m["kt2"] == pytest.approx(0.22, rel=0.01)
    code, out2, _ = run(["metrics", model], capsys)
    assert json.loads(out2)["q_max"] == pytest.approx(m["q_max"], rel=1e-6)
    code, out3, _ = run(["metrics", s1p, "--raw", "--band", "6.4e9:6.7e9"], capsys)
    assert code == 0 and json.loads(out3)["q_max"] > 0


def test_metrics_extraction_failure_exit_code(tmp_path, capsys):
    p = tmp_path / "flat.s1p"
    write_s1p(p, FrequencySweep(np.linspace(1e9, 2e9, 50), np.zeros(50)))
    assert run(["metrics", p, "--raw"], capsys)[0] == 3
    assert run(["metrics", p, "--band", "1e9"], capsys)[0] == 2


def test_synth_stdout_and_range_error(capsys):
    code, out, _ = run(["synth", "--fs", 6.531e9, "--kt2", 0.22, "--c0", 330e-15, "--q", 565], capsys)
    assert code == 0
    b = json.loads(out)["branches"][0]
    assert b["c_m"] == pytest.approx(58.85e-15, rel=1e-3)
    assert "e-14" in out
    assert run(["synth", "--fs", 6.531e9, "--kt2", 1.5, "--c0", 330e-15, "--q", 565], capsys)[0] == 2


def test_p1db_command(tmp_path, capsys):
    p = np.arange(-15.0, 13.0001, 0.25)
    f = tmp_path / "ps.csv"
    f.write_text("pin_dbm,response_db\n" + "".join(f"{a},{b}\n" for a, b in zip(p, soft_compression(p, 11.6))))
    code, out, _ = run(["p1db", f], capsys)
    assert code == 0 and abs(float(out) - 11.6) < 0.1
    f.write_text("pin_dbm,response_db\n" + "".join(f"{a},{a}\n" for a in p))
    assert run(["p1db", f], capsys)[1].strip() == "not found"
    f.write_text("pin,resp\n1,2\n")
    assert run(["p1db", f], capsys)[0] == 2


def test_compare_command(tmp_path, capsys):
    src = tmp_path / "survey.csv"
    src.write_text("label,technology,fs_hz,fp_hz,qmax\n" + "".join(
        f"{k},SH-SAW,{d.f_s},{d.f_p},{d.q_max}\n" for k, d in REPORTED_DEVICES.items()
    ))
    out = tmp_path / "table.csv"
    assert run(["compare", src, "--out", out], capsys)[0] == 0
    rows = [ln.split(",") for ln in out.read_text().splitlines()[1:]]
    assert [r[0] for r in rows] == list("ABCDEF")
    src.write_text("label,technology,fs_hz,fp_hz,qmax\nbad,x,5e9,4e9,100\n")
    code, _, err = run(["compare", src], capsys)
    assert code == 2 and "bad" in err


def test_dispersion_command(tmp_path, capsys):
    stack = {
        "open": {"v_layer": 3600, "mu_layer": 6.1e10, "v_sub": 7100, "mu_sub": 1.6e11},
        "short": {"v_layer": 3300, "mu_layer": 6.1e10, "v_sub": 7100, "mu_sub": 1.6e11},
    }
    sp = tmp_path / "stack.json"
    sp.write_text(json.dumps(stack))
    out = tmp_path / "k.csv"
    assert run(["dispersion", "--stack", sp, "--grid", "0.1:1.0:10", "--csv", out], capsys)[0] == 0
    data = np.loadtxt(out, delimiter=",", skiprows=1)
    assert data.shape == (10, 4)
    assert np.all((data[:, 3] > 0) & (data[:, 3] < 1))
    assert run(["dispersion", "--stack", json.dumps(stack), "--grid", "0:1:2.5"], capsys)[0] == 2
    assert run(["dispersion", "--stack", "{}", "--grid", "0:1:3"], capsys)[0] == 2


def test_module_entry_point(truth_s1p):
    r = subprocess.run([sys.executable, "-m", "sawkit", "parse", str(truth_s1p)], capture_output=True, text=True)
    assert r.returncode == 0 and "2001 points" in r.stdout
