from __future__ import annotations

import csv
import json
import subprocess
import sys

import pytest

from ffmoments.cli import main, parse_range
from ffmoments.report import MOMENT_COLUMNS


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_range():
    assert parse_range("2..5") == [2, 3, 4, 5]
    assert parse_range("3") == [3]
    assert parse_range("1,4") == [1, 4]


def test_verify_passes(capsys):
    code, out, _ = run(["verify", "--q", "3", "--g-max", "3", "--mu-max", "3"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 12 and all(l.startswith("PASS") for l in lines)


def test_gvalues_empty_product(capsys):
    code, out, _ = run(["gvalues", "--q", "3", "--m", "0", "--cutoff", "0"], capsys)
    assert code == 0
    row = next(csv.DictReader(out.splitlines()))
    assert row["partial"] == "1/1" and float(row["partial_float"]) == 1.0


def test_moments_csv(tmp_path, capsys):
    out = tmp_path / "m.csv"
    code, _, err = run(["moments", "--q", "3", "--parity", "odd", "--g", "2..5", "--mu", "1",
                        "--cutoff", "14", "--out", str(out)], capsys)
    assert code == 0, err
    with open(out, newline="") as fh:
        reader = csv.DictReader(fh)
        assert tuple(reader.fieldnames) == MOMENT_COLUMNS
        rows = list(reader)
    assert len(rows) == 4
    rel = [float(r["rel_dev"]) for r in rows]
    assert all(b < a for a, b in zip(rel, rel[1:]))
    for r in rows:
        for key in ("empirical_a", "empirical_b"):
            p, s = r[key].split("/")
            int(p), int(s)
    assert "(ln q)^mu" in err


def test_moments_json_mirrors_csv(tmp_path, capsys):
    base = ["moments", "--q", "3", "--parity", "even", "--g", "2,3", "--mu", "1"]
    assert main(base + ["--out", str(tmp_path / "a.csv")]) == 0
    assert main(base + ["--format", "json", "--out", str(tmp_path / "a.json")]) == 0
    capsys.readouterr()
    data = json.loads((tmp_path / "a.json").read_text())
    with open(tmp_path / "a.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [tuple(r) for r in data["rows"]] == [MOMENT_COLUMNS] * 2
    for jr, cr in zip(data["rows"], rows):
        assert {k: str(v) for k, v in jr.items()} == cr
    assert data["meta"]["normalization"] == {"even": "(-ln q)^mu"}


def test_output_identical_across_worker_counts(tmp_path, capsys):
    outs = []
    for w in ("1", "2"):
        path = tmp_path / f"w{w}.csv"
        assert main(["moments", "--g", "2..3", "--mu", "1,2", "--workers", w, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1]


def test_components(capsys):
    code, out, err = run(["components", "--q", "3", "--g", "1..3", "--mu-max", "1"], capsys)
    assert code == 0, err
    kinds = {r["kind"] for r in csv.DictReader(out.splitlines())}
    assert kinds == {"S", "M", "T", "N"}


def test_zeros(capsys):
    code, out, _ = run(["zeros", "--q", "3", "--g", "1", "--parity", "both"], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    assert len(rows) == 18 + 54
    assert all(r["ok"] == "true" for r in rows)


@pytest.mark.parametrize("argv", [
    ["moments", "--q", "4"],
    ["moments", "--g", "x..y"],
    ["moments", "--cutoff", "3"],
    ["moments", "--g", "0"],
    ["verify", "--mu-max", "-1"],
    ["nosuchcommand"],
    ["moments", "--format", "xml"],
])
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert "error" in err


def test_budget_exit_3(capsys):
    code, _, err = run(["moments", "--g", "6", "--budget", "1000"], capsys)
    assert code == 3
    assert "exceeds budget" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ffmoments", "gvalues", "--m", "0", "--cutoff", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "3/4" in proc.stdout


def test_workers_env_override(monkeypatch):
    from ffmoments.ensemble import default_workers

    monkeypatch.setenv("FFMOMENTS_WORKERS", "3")
    assert default_workers() == 3
