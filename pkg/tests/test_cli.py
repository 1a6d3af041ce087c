import csv
import math
import subprocess
import sys

import numpy as np
import pytest

from qrws.cli import angle, build_parser, main
from qrws.surrogate import init_model, save_model
from qrws.walk import run

PI = math.pi


def call(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def parsed(out):
    vals = {}
    for line in out.splitlines():
        for tok in line.split():
            if "=" in tok:
                k, v = tok.split("=", 1)
                vals[k] = v
    return vals


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.mark.parametrize(
    "text, value",
    [("pi", PI), ("-pi/2", -PI / 2), ("2*pi", 2 * PI), ("0.8pi", 0.8 * PI), ("π", PI), ("1.5", 1.5), (" 3 ", 3.0)],
)
def test_angle_parsing(text, value):
    assert angle(text) == pytest.approx(value, abs=1e-15)


@pytest.mark.parametrize("text", ["foo", "pi/0", "inf", "nan", "pi pi"])
def test_angle_rejects(text):
    with pytest.raises(Exception):
        angle(text)


def test_simulate_grover(capsys):
    code, out, _ = call(capsys, "simulate", "--n", 2, "--phi", "3.14159265358979", "--zeta", "3.14159265358979", "--target", 2)
    assert code == 0
    v = parsed(out)
    assert float(v["p"]) == pytest.approx(0.390625, abs=1e-9)
    assert v["k"] == "5"
    ref = run(2, 3.14159265358979, 3.14159265358979, (2,)).probability
    assert v["p"] == format(ref, ".17g")


def test_simulate_no_walk(capsys):
    code, out, _ = call(capsys, "simulate", "--n", 2, "--phi", 0, "--zeta", 0, "--target", 2)
    assert code == 0 and float(parsed(out)["p"]) == 0.0625


def test_simulate_scan(capsys, tmp_path):
    out_csv = tmp_path / "scan.csv"
    code, out, _ = call(capsys, "simulate", "--n", 3, "--phi", "pi", "--zeta", "pi", "--scan", 60, "--out", out_csv, "--plot")
    assert code == 0
    rows = read_csv(out_csv)
    assert len(rows) == 61
    p = np.array([float(r["p"]) for r in rows])
    assert abs(int(np.argmax(p)) - 18) <= 1
    assert parsed(out)["k"] == "18"
    assert (tmp_path / "scan.plot.py").exists()


@pytest.mark.parametrize(
    "argv, kind",
    [
        (["simulate", "--n", "5", "--phi", "pi", "--zeta", "pi"], "error:qrws_core:memory:"),
        (["simulate", "--n", "3", "--phi", "pi", "--zeta", "pi", "--max-n", "2"], "error:qrws_core:memory:"),
        (["simulate", "--n", "2", "--phi", "x", "--zeta", "pi"], "error:cli:usage:"),
        (["simulate", "--n", "0", "--phi", "1", "--zeta", "1"], "error:cli:usage:"),
        (["simulate", "--n", "1", "--phi", "1", "--zeta", "1", "--target", "4"], "error:qrws_core:validation:"),
        (["simulate", "--n", "1", "--phi", "1", "--zeta", "1", "--scan", "3"], "error:qrws_core:validation:"),
        (["profile", "--n", "1", "--curve", "sine", "--fraction", "1.5"], "error:cli:usage:"),
        (["optimize", "--n", "1", "--source", "dnn"], "error:optimize:validation:"),
        (["nonsense"], "error:cli:usage:"),
    ],
)
def test_validation_errors_exit_2(capsys, argv, kind):
    code, _, err = call(capsys, *argv)
    assert code == 2
    lines = err.strip().splitlines()
    assert len(lines) == 1 and lines[0].startswith(kind)


def test_runtime_errors_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.model"
    bad.write_text('{"format": "qrws-mlp", "vers')
    code, _, err = call(capsys, "predict", "--model", bad, "--phi", 1, "--zeta", 1)
    assert code == 1 and err.startswith("error:surrogate:format:")
    code, _, err = call(capsys, "predict", "--model", tmp_path / "none.model", "--phi", 1, "--zeta", 1)
    assert code == 1 and err.startswith("error:surrogate:io:")
    data = tmp_path / "d.csv"
    data.write_text("phi,zeta,n,p,k_eq1,k_best\n0.1,0.2,2,1.5,5,\n")
    code, _, err = call(capsys, "train", "--data", data, "--layers", 1, "--neurons", 2, "--out", tmp_path / "m")
    assert code == 1 and err.startswith("error:surrogate:format:") and ":2:" in err


def test_grid_command(capsys, tmp_path):
    out_csv = tmp_path / "g.csv"
    code, _, _ = call(capsys, "grid", "--n", 2, "--res", 101, "--out", out_csv, "--plot")
    assert code == 0
    rows = read_csv(out_csv)
    assert len(rows) == 10201
    phi = np.array([float(r["phi"]) for r in rows])
    zeta = np.array([float(r["zeta"]) for r in rows])
    j = np.argmin((phi - PI) ** 2 + (zeta - PI) ** 2)
    assert float(rows[j]["p"]) >= 0.39
    script = (tmp_path / "g.plot.py").read_text()
    assert "pcolormesh" in script and "g.csv" in script


def test_sweep_idempotent_and_workers(capsys, tmp_path, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert call(capsys, "sweep", "--n", 2, "--samples", 300, "--seed", 42, "--workers", 1, "--out", a)[0] == 0
    monkeypatch.setenv("QRWS_WORKERS", "3")
    assert call(capsys, "sweep", "--n", 2, "--samples", 300, "--seed", 42, "--out", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nsamples = 20\nseed=3\nk-best=true\n")
    out_csv = tmp_path / "s.csv"
    code, _, _ = call(capsys, "--config", cfg, "sweep", "--n", 1, "--out", out_csv, "--samples", 7)
    assert code == 0
    rows = read_csv(out_csv)
    assert len(rows) == 7
    assert all(r["k_best"] != "" for r in rows)
    ref = tmp_path / "ref.csv"
    call(capsys, "sweep", "--n", 1, "--out", ref, "--samples", 7, "--seed", 3, "--k-best")
    assert ref.read_bytes() == out_csv.read_bytes()


@pytest.mark.parametrize("body", ["bogus=1\n", "just words\n", "k-best=maybe\n"])
def test_config_file_errors(capsys, tmp_path, body):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(body)
    code, _, err = call(capsys, "--config", cfg, "sweep", "--n", 1, "--out", tmp_path / "x.csv", "--samples", 2)
    assert code == 2 and err.startswith("error:cli:config:")


def test_train_predict_gridsearch(capsys, tmp_path):
    d1, d3 = tmp_path / "d1.csv", tmp_path / "d3.csv"
    call(capsys, "sweep", "--n", 1, "--samples", 400, "--seed", 1, "--out", d1)
    call(capsys, "sweep", "--n", 3, "--samples", 200, "--seed", 1, "--out", d3)
    model, hist = tmp_path / "c.model", tmp_path / "h.csv"
    code, out, _ = call(capsys, "train", "--data", d1, d3, "--layers", 2, "--neurons", 4, "--epochs", 3,
                        "--out", model, "--history", hist, "--plot")
    assert code == 0 and "val_loss" in parsed(out)
    assert read_csv(hist)[0].keys() == {"epoch", "train_loss", "val_loss"}
    code, out, _ = call(capsys, "predict", "--model", model, "--phi", "3.1416", "--zeta", "3.1416", "--n", 4)
    assert code == 0 and 0.0 < float(parsed(out)["p"]) < 1.0
    assert call(capsys, "predict", "--model", model, "--phi", 1, "--zeta", 1)[0] == 2

    gs = tmp_path / "gs.csv"
    code, out, _ = call(capsys, "gridsearch", "--data", d1, "--layers", "1,2", "--neurons", "3:5", "--epochs", 2, "--out", gs)
    assert code == 0 and len(read_csv(gs)) == 6
    assert call(capsys, "train", "--data", d1, d3, "--input-dim", 2, "--layers", 1, "--neurons", 2,
                "--out", tmp_path / "m2")[0] == 2


def test_train_idempotent(capsys, tmp_path):
    d = tmp_path / "d.csv"
    call(capsys, "sweep", "--n", 1, "--samples", 200, "--seed", 0, "--out", d)
    a, b = tmp_path / "a.model", tmp_path / "b.model"
    for path in (a, b):
        call(capsys, "train", "--data", d, "--layers", 1, "--neurons", 3, "--epochs", 2, "--out", path)
    assert a.read_bytes() == b.read_bytes()


def test_optimize_command(capsys, tmp_path):
    out_csv = tmp_path / "o.csv"
    code, out, _ = call(capsys, "optimize", "--n", 1, "--generations", 40, "--out", out_csv)
    assert code == 0 and float(parsed(out)["p"]) >= 0.499
    (row,) = read_csv(out_csv)
    assert row["method"] == "differential_evolution" and row["n"] == "1"
    model = tmp_path / "m.model"
    save_model(init_model(2, 1, 3), model)
    code, out, _ = call(capsys, "optimize", "--n", 1, "--source", "dnn", "--model", model, "--generations", 3)
    assert code == 0 and "p_sim" in parsed(out)


def test_ridge_fit_profile_commands(capsys, tmp_path):
    code, out, _ = call(capsys, "fit-alpha", "--source", "sim", "--n", 2, "--grid-size", 101, "--out", tmp_path / "f.csv")
    assert code == 0 and float(parsed(out)["alpha"]) == pytest.approx(-0.149, abs=0.03)
    code, _, _ = call(capsys, "ridge", "--n", 1, "--grid-size", 21, "--out", tmp_path / "r.csv", "--plot")
    assert code == 0 and len(read_csv(tmp_path / "r.csv")) == 21
    code, out, _ = call(capsys, "profile", "--n", 2, "--curve", "sine", "--alpha", "-0.159", "--out", tmp_path / "p.csv", "--plot")
    assert code == 0
    v = parsed(out)
    assert float(v["p_max"]) > 0.3915 and float(v["width"]) > 0
    assert (tmp_path / "p.plot.py").exists()


def test_reproduce_partial(capsys, tmp_path):
    code, _, _ = call(capsys, "reproduce", "--out-dir", tmp_path, "--n-max", 2, "--grid-size", 41)
    assert code == 0
    t1 = read_csv(tmp_path / "table1.csv")
    de2 = next(r for r in t1 if r["method"] == "de_sim" and r["n"] == "2")
    assert float(de2["p"]) >= 0.391
    dnn = [r for r in t1 if r["method"].endswith("_dnn")]
    assert dnn and all(r["p"] == "NA" for r in dnn)
    t2 = read_csv(tmp_path / "table2.csv")
    assert [r["n"] for r in t2] == ["1", "2"]
    assert all(r["alpha_dnn"] == "NA" for r in t2)


def test_help_lists_every_flag(capsys):
    parser = build_parser()
    sub = next(a for a in parser._actions if hasattr(a, "choices") and isinstance(a.choices, dict))
    for name, p in sub.choices.items():
        for action in p._actions:
            if action.option_strings and action.dest != "help":
                assert action.help, f"{name} {action.option_strings} lacks help"
        assert call(capsys, name, "--help")[0] == 0


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "qrws", "simulate", "--n", "1", "--phi", "pi", "--zeta", "pi"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0
    assert parsed(res.stdout)["k"] == "3"
    assert float(parsed(res.stdout)["p"]) == pytest.approx(0.25, abs=1e-12)


@pytest.mark.slow
def test_fit_alpha_three_qubits(capsys):
    code, out, _ = call(capsys, "fit-alpha", "--source", "sim", "--n", 3)
    assert code == 0
    assert -0.232 <= float(parsed(out)["alpha"]) <= -0.172
