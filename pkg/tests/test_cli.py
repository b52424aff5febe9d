import csv
import json
import math

import pytest

from cvbell.cli import main
from cvbell.sweep import FIELDS, SweepConfig, run_sweep

ROOT2 = 2 * math.sqrt(2)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_two_point_sweep(tmp_path):
    out = tmp_path / "s.csv"
    rc = main(["sweep", "--zeta-min", "0", "--zeta-max", "0.5", "--steps", "2", "--levels", "0", "--output", str(out)])
    assert rc == 0
    rows = read_csv(out)
    assert [float(r["biqv"]) for r in rows] == pytest.approx([2.0, 2.39933], abs=1e-5)
    assert rows[1]["level"] == "0" and rows[1]["method"] == "closed"


def test_header_and_crlf(tmp_path):
    out = tmp_path / "s.csv"
    main(["sweep", "--steps", "3", "--output", str(out)])
    raw = out.read_bytes()
    assert raw.splitlines()[0].decode() == ",".join(FIELDS)
    assert b"\r\n" in raw


def test_both_methods_and_ordering(tmp_path):
    out = tmp_path / "s.csv"
    rc = main(["sweep", "--zeta-max", "1.2", "--steps", "4", "--levels", "inf,0,2", "--method", "both", "--output", str(out)])
    assert rc == 0
    rows = read_csv(out)
    assert len(rows) == 4 * 3 * 2
    assert [r["level"] for r in rows[::8]] == ["0", "2", "inf"]
    for closed, matrix in zip(rows[::2], rows[1::2]):
        assert closed["method"] == "closed" and matrix["method"] == "matrix"
        assert float(closed["biqv"]) == pytest.approx(float(matrix["biqv"]), abs=1e-9)
        assert matrix["cutoff"] and float(matrix["truncation_weight"]) < 1e-12


def test_twelve_significant_digits(tmp_path):
    out = tmp_path / "s.csv"
    main(["sweep", "--zeta-min", "0.5", "--zeta-max", "1", "--steps", "2", "--output", str(out)])
    biqv = read_csv(out)[0]["biqv"]
    assert len(biqv.replace(".", "").lstrip("0")) == 12


def test_json_mirrors_csv(tmp_path):
    c, j = tmp_path / "a.csv", tmp_path / "a.json"
    args = ["sweep", "--zeta-max", "1", "--steps", "3", "--levels", "1,inf", "--method", "both"]
    main(args + ["--output", str(c)])
    main(args + ["--output", str(j), "--format", "json"])
    rows, records = read_csv(c), json.loads(j.read_text())
    assert len(rows) == len(records)
    for row, rec in zip(rows, records):
        assert list(rec) == list(FIELDS)
        assert float(row["biqv"]) == rec["biqv"]
        assert row["level"] == str(rec["level"])


def test_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "--zeta-max", "1.5", "--steps", "7", "--levels", "0,1,inf", "--method", "both"]
    main(args + ["--output", str(a)])
    main(args + ["--output", str(b), "--jobs", "3"])
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize(
    "args",
    [
        ["--zeta-min", "1", "--zeta-max", "0.5"],
        ["--zeta-min", "-0.1"],
        ["--steps", "1"],
        ["--levels", "x"],
        ["--cutoff", "many"],
        ["--method", "matrix", "--zeta-max", "3"],
        ["--method", "matrix", "--cutoff", "5", "--levels", "3"],
        ["--family", "parity", "--levels", "0"],
    ],
)
def test_usage_errors(tmp_path, capsys, args):
    out = tmp_path / "never.csv"
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--output", str(out)] + args)
    assert exc.value.code == 2
    assert not out.exists()


def test_numeric_failure_names_point(tmp_path, capsys, monkeypatch):
    import cvbell.sweep as sweep

    def boom(zeta, level, cutoff):
        raise ArithmeticError("synthetic")

    monkeypatch.setattr(sweep, "correlators_state_picture", boom)
    out = tmp_path / "x.csv"
    rc = main(["sweep", "--method", "matrix", "--zeta-max", "0.5", "--steps", "2", "--levels", "1", "--output", str(out)])
    assert rc == 1
    assert "zeta=0 level=1" in capsys.readouterr().err
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []


def test_disagreement_is_numeric_failure(tmp_path, capsys, monkeypatch):
    import cvbell.sweep as sweep
    from cvbell.bell import CorrelatorPair

    monkeypatch.setattr(sweep, "closed_form_correlators", lambda zeta, level: CorrelatorPair(1.0, 0.0))
    out = tmp_path / "x.csv"
    rc = main(["sweep", "--method", "both", "--zeta-max", "1.2", "--steps", "2", "--output", str(out)])
    assert rc == 1
    assert "zeta=1.2 level=inf" in capsys.readouterr().err


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("zeta_max: 0.5\nsteps: 2\nlevels: [0]\nmethod: both\nformat: json\n")
    out = tmp_path / "o.json"
    assert main(["sweep", "--config", str(cfg), "--steps", "3", "--output", str(out)]) == 0
    records = json.loads(out.read_text())
    assert len(records) == 3 * 2
    assert {r["level"] for r in records} == {0}


def test_bad_config_key(tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("speed: 3\n")
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--config", str(cfg)])
    assert exc.value.code == 2


def test_parity_family(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["sweep", "--family", "parity", "--method", "both", "--zeta-max", "1", "--steps", "3", "--output", str(out)]) == 0
    rows = read_csv(out)
    assert all(r["level"] == "inf" for r in rows)
    assert float(rows[-1]["F"]) == pytest.approx(2 / math.pi * math.atan(math.sinh(2.0)), abs=1e-6)


@pytest.fixture(scope="module")
def fig1(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig") / "fig1.csv"
    assert main(["figure", "fig1", "--output", str(out)]) == 0
    return out


class TestFigure:
    def test_row_count(self, fig1):
        assert len(read_csv(fig1)) == 605

    def test_full_dominates(self, fig1):
        rows = read_csv(fig1)
        by = {}
        for r in rows:
            by.setdefault(r["zeta"], {})[r["level"]] = float(r["biqv"])
        for values in by.values():
            assert all(values[lv] <= values["inf"] for lv in "0123")
        assert by["3"]["inf"] == pytest.approx(ROOT2, rel=5e-3)

    def test_fig2_ratio(self, tmp_path):
        out = tmp_path / "fig2.csv"
        assert main(["figure", "fig2", "--output", str(out)]) == 0
        rows = read_csv(out)
        assert len(rows) == 605
        for r in rows:
            assert float(r["ratio"]) == pytest.approx(float(r["biqv"]) / ROOT2, rel=1e-10)
        full = [float(r["ratio"]) for r in rows if r["level"] == "inf"]
        assert full[-1] > 0.9999


class TestVerify:
    def test_all_pass(self, capsys):
        assert main(["verify"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out
        assert "peak_ratio_level0" in out

    def test_forced_truncation_fails(self, capsys, tmp_path):
        report = tmp_path / "report.txt"
        rc = main(["verify", "--cutoff", "4", "--zeta", "1.5", "--report", str(report)])
        assert rc == 1
        text = report.read_text()
        assert "FAIL  full_correlators" in text
        assert "FAIL  cutoff_convergence" in text
        assert "PASS  peak_ratio_level0" in text


def test_run_sweep_api():
    recs = run_sweep(SweepConfig(zeta_max=1.0, steps=3, levels=[0, "inf"]))
    assert [r["level"] for r in recs] == [0, 0, 0, math.inf, math.inf, math.inf]


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "cvbell", "sweep", "--steps", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("zeta,level,I,F")
