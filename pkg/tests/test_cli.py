import json

import pytest

from hypercircle.harness.cli import main


def test_count(capsys):
    assert main(["count", "--z", "0/1", "1/1", "--X", "100"]) == 0
    assert capsys.readouterr().out.strip() == "290"


def test_unknown_flag(capsys):
    assert main(["count", "--z", "0", "1", "--X", "10", "--bogus"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["count", "--z", "0", "-1", "--X", "10"]) == 2
    assert main(["identity", "--t1", "3"]) == 2


def test_identity_pass(tmp_path, capsys):
    code = main(["identity", "--t1", "3", "--t2", "4", "--x", "200", "--tol", "0.02",
                 "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0 and "PASS" in out
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["status"] == "ok" and man["versions"]["numpy"]
    assert (tmp_path / "identity.csv").exists()


def test_identity_fail_exit(capsys):
    assert main(["identity", "--t1", "3", "--t2", "4", "--x", "60", "--tol", "1e-12",
                 "--grid", "40"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_cap(tmp_path, capsys):
    assert main(["count", "--z", "0", "1", "--X", "100000", "--cap", "1000"]) == 3
    code = main(["error-scan", "--X", "1000", "100000", "--grid", "2", "--cap", "10000",
                 "--out", str(tmp_path)])
    assert code == 3
    text = (tmp_path / "error_scan.csv").read_text().splitlines()
    assert len(text) == 1 + 4  # header plus the X = 1000 rows that fit


def test_config_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"experiment": "count", "parameters": {"z": ["1/4", "3/2"], "X": [100]},
                               "outputs": {"dir": str(tmp_path / "o")}, "workers": 1}))
    assert main(["count", "--config", str(cfg)]) == 0
    first = capsys.readouterr().out.split()
    assert main(["count", "--config", str(cfg), "--X", "1000"]) == 0
    second = capsys.readouterr().out.split()
    assert first != second
    assert (tmp_path / "o" / "count.csv").exists()
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["count", "--config", str(bad)]) == 2


@pytest.mark.parametrize("argv", [
    ["ball", "--z", "1/4", "3/2", "--X", "7"],
    ["trace-class", "--z", "0", "1", "--t", "3", "--x", "50"],
    ["pairclass", "--d1", "5", "--d2", "5", "--t", "27", "--oracle"],
    ["transform-check", "--x", "1000", "--D", "50"],
    ["lemma52", "--x", "10000", "--D", "200", "--tol", "1"],
])
def test_subcommands(argv, capsys):
    assert main(argv) == 0


def test_scan_then_fit(tmp_path, capsys):
    assert main(["error-scan", "--X", "1000", "3000", "10000", "100000", "--grid", "3",
                 "--out", str(tmp_path)]) == 0
    assert main(["fit", "--input", str(tmp_path / "error_scan.csv"), "--tol", "0.7"]) == 0
    assert "slope" in capsys.readouterr().out
    assert main(["fit", "--input", str(tmp_path / "missing.csv")]) == 2
