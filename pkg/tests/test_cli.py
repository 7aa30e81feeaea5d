import csv
import io
import json
import subprocess
import sys

import pytest

from rubberrope.cli import RECORD_COLUMNS, SWEEP_COLUMNS, classic_rows, main

CONST = ["--step", "constant:c=1", "--stretch", "constant:c=2", "--l0", "2"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def error_line(err):
    lines = [ln for ln in err.splitlines() if ln.startswith("rubberrope: error[")]
    assert len(lines) == 1, err
    return lines[0]


# --- classic / solve ---------------------------------------------------------------

def test_classic_rows():
    rows = dict((m, (f, e)) for m, f, e in classic_rows([1, 2, 100]))
    assert rows[1] == (1e-05, "1/100000")
    assert rows[2] == (1.5e-05, "3/200000")
    assert rows[100][0] == pytest.approx(5.187377517639621e-05, rel=1e-15)


def test_classic_text(capsys):
    code, out, _ = run(capsys, "classic", "--m", "1", "2")
    assert code == 0
    assert "1/100000" in out and "3/200000" in out and "1.5e-05" in out
    assert "log10(T) ≈ 43429.2" in out


def test_classic_json_and_csv(capsys):
    _, out, _ = run(capsys, "classic", "--m", "1", "3", "--format", "json")
    doc = json.loads(out)
    assert doc["rows"][1]["exact"] == "11/600000"
    assert abs(doc["log10_hitting_time"] - 43429.2) < 0.1
    _, out, _ = run(capsys, "classic", "--m", "2", "--format", "csv")
    assert out == "m,fraction,exact_fraction\n2,1.5e-05,3/200000\n"


@pytest.mark.parametrize("args, text", [
    (("2", "1", "2"), "T = 4 (exact)"),
    (("5", "5", "1"), "T = 1 (exact)"),
    (("100000", "1", "100000"), "log10(T) ≈ 43429.2 (asymptotic"),
])
def test_solve_render(capsys, args, text):
    code, out, _ = run(capsys, "solve", "--l0", args[0], "--x", args[1], "--L", args[2])
    assert code == 0 and out.startswith(text)


def test_solve_json(capsys):
    _, out, _ = run(capsys, "solve", "--l0", "10", "--step-size", "1", "--stretch-size", "10",
                    "--format", "json")
    doc = json.loads(out)
    assert doc["hitting_time"] == 12367 and doc["method"] == "exact_rational"


# --- simulate -----------------------------------------------------------------------

def test_simulate_constant_rows(capsys):
    code, out, err = run(capsys, "simulate", *CONST, "--n", "5", "--cap", "100")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == RECORD_COLUMNS
    assert [r[:3] for r in rows[1:]] == [[str(i), "4", "false"] for i in range(5)]
    assert "mean T = 4" in err


def test_simulate_json_schema(capsys):
    _, out, _ = run(capsys, "simulate", "--n", "20", "--seed", "3", "--format", "json")
    doc = json.loads(out)
    assert set(doc) == {"records", "summary"}
    assert set(doc["records"][0]) == set(RECORD_COLUMNS)
    s = doc["summary"]
    for key in ("mean", "ci_lo", "ci_hi", "n_censored", "survival"):
        assert key in s
    assert s["survival"][0] == 1.0 and s["n_censored"] == 0
    assert s["ci_lo"] < s["mean"] < s["ci_hi"]


def test_simulate_byte_identical(tmp_path):
    outs = []
    for i, jobs in enumerate(("1", "1", "8")):
        path = tmp_path / f"r{i}.csv"
        assert main(["simulate", "--n", "1000", "--seed", "42", "--jobs", jobs, "--out", str(path)]) == 0
        outs.append((path.read_bytes(), (tmp_path / f"r{i}.csv.summary.json").read_bytes()))
    assert outs[0] == outs[1] == outs[2]


def test_simulate_seed_changes_output(capsys):
    _, a, _ = run(capsys, "simulate", "--n", "10", "--seed", "1")
    _, b, _ = run(capsys, "simulate", "--n", "10", "--seed", "2")
    assert a != b


def test_censoring_warning_and_strict(capsys):
    code, out, err = run(capsys, "simulate", *CONST, "--n", "3", "--cap", "3")
    assert code == 0 and "warning: 3 trajectories censored" in err
    assert out.splitlines()[1] == "0,,true,0.9166666666666666"
    code, _, err = run(capsys, "simulate", *CONST, "--n", "3", "--cap", "3", "--strict")
    assert code == 1
    assert error_line(err).startswith("rubberrope: error[censored]:")


def test_all_censored_json_has_null_mean(capsys):
    _, out, _ = run(capsys, "simulate", *CONST, "--n", "2", "--cap", "2", "--format", "json")
    doc = json.loads(out)
    assert doc["summary"]["mean"] is None
    assert doc["records"][0]["hitting_time"] is None and doc["records"][0]["censored"] is True


@pytest.mark.parametrize("argv, kind, code", [
    (["simulate", "--step", "gamma:k=1"], "usage", 2),
    (["simulate", "--step", "exponential:mean=-1"], "usage", 2),
    (["simulate", "--n", "0"], "usage", 2),
    (["simulate", "--cap", "5", "--horizon", "6"], "usage", 2),
    (["simulate", "--step", "pareto:scale=1,shape=0.8", "--n", "1"], "domain", 3),
    (["simulate", "--n", "1", "--out", "/nonexistent/dir/x.csv"], "io", 4),
    (["solve", "--l0", "0", "--x", "1", "--L", "1"], "usage", 2),
    (["nosuch"], "usage", 2),
    (["simulate", "--config", "/nonexistent.json"], "io", 4),
])
def test_errors_are_one_line(capsys, argv, kind, code):
    got, _, err = run(capsys, *argv)
    assert got == code
    assert error_line(err).startswith(f"rubberrope: error[{kind}]:")


def test_explore_allows_infinite_mean(capsys):
    code, out, _ = run(capsys, "simulate", "--step", "pareto:scale=1,shape=0.8", "--explore",
                       "--n", "5", "--cap", "1000", "--format", "json")
    assert code == 0
    assert json.loads(out)["summary"]["within_hypotheses"] is False


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"l0": 2, "step": "constant:c=1", "stretch": "constant:c=2",
                               "n": 4, "cap": 100, "seed": 9}))
    _, out, _ = run(capsys, "simulate", "--config", str(cfg))
    assert len(out.splitlines()) == 5
    _, out, _ = run(capsys, "simulate", "--config", str(cfg), "--n", "2")
    assert len(out.splitlines()) == 3


# --- sweep ----------------------------------------------------------------------------

def test_sweep_monotone_in_l0(capsys):
    code, out, _ = run(capsys, "sweep", "--l0-grid", "2,4,8", "--step", "constant:c=1",
                       "--stretch", "constant:c=1", "--n", "3", "--cap", "1000")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert tuple(rows[0]) == SWEEP_COLUMNS
    means = [float(r["mean"]) for r in rows]
    assert means == sorted(means) and len(set(means)) == 3
    assert [r["grid_index"] for r in rows] == ["0", "1", "2"]


def test_sweep_single_point_matches_simulate(capsys, tmp_path):
    _, out, _ = run(capsys, "sweep", "--l0-grid", "1", *CONST[:4], "--n", "4", "--cap", "100",
                    "--records-dir", str(tmp_path))
    row = next(csv.DictReader(io.StringIO(out)))
    _, sim, _ = run(capsys, "simulate", "--l0", "1", *CONST[:4], "--n", "4", "--cap", "100")
    assert (tmp_path / "point_0000.csv").read_text() == sim
    assert row["n_censored"] == "0" and row["ci_lo"] == row["mean"] == row["ci_hi"]


def test_sweep_reproducible_and_grids_independent(capsys):
    argv = ["sweep", "--l0-grid", "3,3", "--n", "30", "--seed", "5", "--cap", "10000"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    r0, r1 = list(csv.DictReader(io.StringIO(a)))
    assert r0["mean"] != r1["mean"]  # same parameters, separate namespaces


def test_sweep_distribution_grid(capsys):
    _, out, _ = run(capsys, "sweep", "--step-grid", "constant:c=1;constant:c=2",
                    "--stretch", "constant:c=1", "--l0", "4", "--n", "1", "--cap", "100")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["step"] for r in rows] == ["constant:c=1.0", "constant:c=2.0"]


# --- diagnose ---------------------------------------------------------------------------

def test_diagnose_constant(capsys, tmp_path):
    out = tmp_path / "d.json"
    code, _, err = run(capsys, "diagnose", "--step", "constant:c=1", "--stretch",
                       "constant:c=1", "--l0", "1", "--n", "200", "--epsilon", "0.1",
                       "--format", "json", "--out", str(out))
    assert code == 0 and ": holds" in err
    d = json.loads(out.read_text())
    assert d["holds"] and d["final_deviation_x"] == 0 and max(d["lln"]["deviation_x"]) == 0


def test_diagnose_exponential(capsys):
    code, _, err = run(capsys, "diagnose", "--n", "200000", "--epsilon", "0.05", "--blocks", "10",
                       "--seed", "3")
    assert code == 0 and ": holds" in err


def test_diagnose_warning_path(capsys, tmp_path):
    out = tmp_path / "trace.csv"
    code, _, err = run(capsys, "diagnose", "--n", "100", "--epsilon", "1e-12", "--out", str(out))
    assert code == 0 and "warning: no block length" in err
    lines = out.read_text().splitlines()
    assert lines[0] == "n,running_mean_x,deviation_x,running_mean_l,deviation_l"
    assert len(lines) == 101


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rubberrope", "solve", "--l0", "2", "--x", "1",
                           "--L", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "T = 4 (exact)\n"
