import json
import subprocess
import sys

import pytest

from canardkit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def error_payload(err):
    payload = json.loads(err.strip().splitlines()[-1])
    assert isinstance(payload["code"], str) and payload["code"]
    return payload


# -- expand / mu ---------------------------------------------------------------------

def test_expand_gspm_order_four(capsys):
    code, out, _ = run(capsys, "expand", "--system", "vdp", "--method", "gspm", "--order", "4")
    d = json.loads(out)
    assert code == 0
    assert d["mu"] == ["1", "-1/8", "-3/32", "-173/1024"]
    assert d["F"][1] == {"num": "-1", "den": "x + 1"}


def test_expand_fcm_order_three(capsys):
    code, out, _ = run(capsys, "expand", "--method", "fcm", "--order", "3")
    assert code == 0 and json.loads(out)["mu"] == ["1", "-1/8", "-3/32"]


def test_expand_at_the_other_fold(capsys, tmp_path):
    target = tmp_path / "e.json"
    code, out, _ = run(capsys, "expand", "--order", "2", "--fold", "-1", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["mu"] == ["-1", "1/8"]


def test_expand_order_zero_is_a_usage_error(capsys):
    code, out, err = run(capsys, "expand", "--method", "gspm", "--order", "0")
    assert code == 64 and out == ""
    assert error_payload(err)["code"] == "usage"


@pytest.mark.parametrize("argv, value", [
    (("mu", "--eps", "0.01", "--order", "2"), "0.99874062500000005"),
    (("mu", "--eps", "0", "--order", "3"), "1"),
])
def test_mu_printing(capsys, argv, value):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out.strip() == value


def test_mu_at_order_three(capsys):
    _, out, _ = run(capsys, "mu", "--eps", "0.01", "--order", "3")
    assert abs(float(out) - 0.998740451) <= 1e-7


def test_curvature_cap_and_override(capsys, monkeypatch):
    code, _, err = run(capsys, "expand", "--method", "fcm", "--order", "5")
    assert code == 2 and error_payload(err)["code"] == "solver_error"
    monkeypatch.setenv("CANARDKIT_MAX_PHI", "5")
    code, out, _ = run(capsys, "expand", "--method", "fcm", "--order", "5")
    assert code == 0 and json.loads(out)["mu"][3] == "-173/1024"


# -- error contract -------------------------------------------------------------------

def test_model_errors_exit_two(capsys, tmp_path):
    path = tmp_path / "half.txt"
    path.write_text("f = y - x^2\n", encoding="utf-8")
    code, _, err = run(capsys, "expand", "--system", str(path), "--order", "1")
    assert code == 2 and error_payload(err)["code"] == "model_error"


def test_syntax_error_in_system_file(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"f": "y - x^2 +", "g": "mu - x"}), encoding="utf-8")
    code, _, err = run(capsys, "expand", "--system", str(path), "--order", "1")
    assert code == 2
    assert "line" in json.dumps(error_payload(err))


def test_missing_file_and_bad_flags(capsys):
    code, _, err = run(capsys, "expand", "--system", "no-such-file.json", "--order", "1")
    assert code == 64 and error_payload(err)["code"] == "usage"
    for argv in (("frobnicate",), ("mu",), ("simulate", "--eps", "0.01", "--mu", "0.9", "--tol", "1e-3"),
                 ("simulate", "--eps", "-1", "--mu", "0.9"), ("sweep", "--eps", "0.01", "--mu-range", "0,1")):
        code, _, err = run(capsys, *argv)
        assert code == 64, argv
        error_payload(err)


def test_bad_bracket_exits_three(capsys):
    code, out, err = run(capsys, "explode", "--eps", "0.01", "--bracket", "0.9,0.95")
    assert code == 3 and out == ""
    assert error_payload(err)["code"] == "bad_bracket"


# -- numeric commands ----------------------------------------------------------------------

def test_simulate_writes_csv_and_sidecar(capsys, tmp_path):
    target = tmp_path / "traj.csv"
    code, _, _ = run(capsys, "simulate", "--eps", "0.01", "--mu", "0.99874045", "--tend", "30",
                     "--out", str(target))
    assert code == 0
    lines = target.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "t,x,y" and float(lines[-1].split(",")[0]) == 30.0
    xs = [float(r.split(",")[1]) for r in lines[1:]]
    # a canard-regime cycle: still oscillating, extent between the small cycle and full relaxation
    late = xs[len(xs) // 2:]
    assert max(late) - min(late) > 0.1
    meta = json.loads((tmp_path / "traj.csv.meta.json").read_text(encoding="utf-8"))
    assert meta["start"] == [2.0, 0.0] and meta["tol"] == 1e-10
    assert {"canardkit", "numpy", "python", "rational_backend"} <= set(meta["versions"])


def test_simulate_to_stdout_with_explicit_sidecar(capsys, tmp_path):
    meta = tmp_path / "m.json"
    code, out, _ = run(capsys, "simulate", "--eps", "0.05", "--mu", "-0.5", "--tend", "1",
                       "--meta", str(meta))
    assert code == 0 and out.startswith("t,x,y\n0,-2,0\n")
    assert json.loads(meta.read_text(encoding="utf-8"))["start"] == [-2.0, 0.0]


def test_sweep_two_rows(capsys, tmp_path):
    target = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", "--eps", "0.01", "--mu", "0.95,1.05", "--out", str(target))
    rows = target.read_text(encoding="utf-8").splitlines()
    assert code == 0 and rows[0] == "mu,amplitude_x,period,classification"
    assert [r.split(",")[-1] for r in rows[1:]] == ["relaxation", "none"]
    assert (tmp_path / "sweep.csv.meta.json").exists()


def test_sweep_of_the_four_regimes(capsys):
    code, out, _ = run(capsys, "sweep", "--eps", "0.01", "--mu", "0.95,0.99874045,0.998740451,1.05")
    labels = [r.split(",")[-1] for r in out.splitlines()[1:]]
    assert code == 0
    assert labels[0] == "relaxation" and labels[-1] == "none"
    assert set(labels[1:3]) <= {"canard", "small"}


def test_sweep_range(capsys):
    code, out, _ = run(capsys, "sweep", "--eps", "0.01", "--mu-range", "1.05,1.1,2")
    assert code == 0 and len(out.splitlines()) == 3


def test_explode(capsys, tmp_path):
    target = tmp_path / "x.json"
    code, out, _ = run(capsys, "explode", "--eps", "0.01", "--resolution", "1e-9", "--out", str(target))
    assert code == 0 and abs(float(out) - 0.99874) <= 5e-4
    meta = json.loads(target.read_text(encoding="utf-8"))
    assert meta["bracket_width"] <= 1e-9 and meta["amplitude_below"] < 2.0 < meta["amplitude_above"]


# -- check ---------------------------------------------------------------------------------

def test_check_passes(capsys):
    code, out, _ = run(capsys, "check")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines and all(line.startswith("PASS ") for line in lines)
    names = {line.split()[1].rstrip(":") for line in lines}
    assert {"gspm_equals_fcm", "series_vs_bisection", "mirror_symmetry"} <= names


def test_check_symbolic_only(capsys):
    code, out, _ = run(capsys, "check", "--skip-numeric")
    assert code == 0 and "series_vs_bisection" not in out


def test_check_detects_corrupted_expansion(capsys, tmp_path):
    _, good, _ = run(capsys, "expand", "--order", "3")
    d = json.loads(good)
    d["mu"][2] = "-3/31"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(d), encoding="utf-8")
    code, out, _ = run(capsys, "check", "--skip-numeric", "--expansion", str(path))
    assert code == 1
    assert any(line.startswith("FAIL ") for line in out.splitlines())


# -- determinism -------------------------------------------------------------------------

def test_identical_invocations_are_byte_identical(tmp_path):
    def once(tag):
        base = tmp_path / tag
        base.mkdir()
        cmds = [["expand", "--method", "fcm", "--order", "3", "--out", str(base / "e.json")],
                ["simulate", "--eps", "0.01", "--mu", "0.9", "--tend", "3", "--out", str(base / "t.csv")],
                ["sweep", "--eps", "0.01", "--mu", "0.95", "--out", str(base / "s.csv")]]
        for c in cmds:
            subprocess.run([sys.executable, "-m", "canardkit.cli", *c], check=True)
        return {p.name: p.read_bytes() for p in sorted(base.iterdir())}

    assert once("a") == once("b")


def test_figure_data(capsys, tmp_path):
    code, out, _ = run(capsys, "figure", "--outdir", str(tmp_path))
    assert code == 0
    labels = [line.split()[1] for line in out.splitlines()]
    assert labels[0] == "relaxation" and labels[-1] == "none"
    assert set(labels[1:3]) <= {"canard", "small"}
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["classification.csv", "critical_manifold.csv", "figure.meta.json",
                     "trajectory_0.csv", "trajectory_1.csv", "trajectory_2.csv", "trajectory_3.csv"]
    cm = (tmp_path / "critical_manifold.csv").read_text(encoding="utf-8").splitlines()
    assert cm[0] == "x,y" and len(cm) == 402
    xv, yv = map(float, cm[201].split(","))
    assert xv == 0.0 and yv == 0.0
    meta = json.loads((tmp_path / "figure.meta.json").read_text(encoding="utf-8"))
    assert [t["mu"] for t in meta["trajectories"]] == [0.99, 0.99874045, 0.998740451, 1.05]
