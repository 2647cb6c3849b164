import csv
import io
import json
import subprocess
import sys

import pytest

from arithwave import __version__
from arithwave.cli import SCHEMAS, normalize, parse_config_text, run, validate_config
from arithwave.errors import ArgumentError


def _run(argv, capsys):
    code = run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_quasi_example(capsys):
    code, out, err = _run(["quasi", "--n", "5", "--l", "2", "--K", "2.0"], capsys)
    assert code == 0
    (row,) = _rows(out)
    assert int(row["count"]) > 0
    # the closest nonzero pair sum is (1, -1)
    assert row["min_gap_sq"] == "2"
    assert err.startswith("quasi:")


def test_corr_odd_l(capsys):
    code, out, _ = _run(["corr", "--n", "5", "--l", "3"], capsys)
    assert code == 0 and _rows(out)[0]["count"] == "0"


def test_version(capsys):
    code, out, _ = _run(["version"], capsys)
    assert code == 0
    assert out.splitlines()[0] == f"arithwave {__version__}"
    assert any(line.startswith("backend=") for line in out.splitlines())


def test_argument_errors_exit_2(capsys):
    assert _run(["corr", "--n", "5"], capsys)[0] == 2
    assert _run(["corr", "--n", "five", "--l", "2"], capsys)[0] == 2
    assert _run(["nonsense"], capsys)[0] == 2
    code, _, err = _run(["simulate", "--n", "5", "--trials", "-5"], capsys)
    assert code == 2 and "trials must be positive" in err


def test_resource_error_exit_3(capsys):
    code, _, err = _run(["corr", "--n", "5525", "--l", "6", "--budget", "10"], capsys)
    assert code == 3 and "budget" in err


def test_output_file_and_config_echo(tmp_path, capsys):
    out = tmp_path / "m.csv"
    code, stdout, _ = _run(["moments", "--n", "5", "--l", "4", "--s", "0.2", "--output", str(out)], capsys)
    assert code == 0 and stdout.startswith("moments:")
    rows = _rows(out.read_text())
    assert rows[0]["n"] == "5"
    echo = tmp_path / "m.csv.config"
    cfg = validate_config(echo, "moments")
    assert cfg.values["l"] == 4 and cfg.values["s"] == 0.2
    out2 = tmp_path / "m2.csv"
    assert run(["moments", "--config", str(echo), "--output", str(out2)]) == 0
    assert out2.read_text() == out.read_text()


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "c.txt"
    cfg.write_text("# comment\nn=25\nl=2\n")
    code, out, _ = _run(["corr", "--config", str(cfg), "--l", "4"], capsys)
    assert code == 0 and _rows(out)[0]["l"] == "4"


def test_json_output(capsys):
    code, out, _ = _run(["points", "--n", "25", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "points" and doc["config"]["n"] == 25
    assert len(doc["rows"]) == 12


def test_config_problems_are_all_listed(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("trials=-5\nbogus=1\nseed=abc\n")
    with pytest.raises(ArgumentError) as info:
        validate_config(p, "simulate")
    msg = str(info.value)
    for part in ("trials must be positive", "unknown key 'bogus'", "seed must be of type int",
                 "missing required key 'n'"):
        assert part in msg


def test_empty_config_fills_defaults(tmp_path):
    p = tmp_path / "empty.txt"
    p.write_text("")
    cfg = validate_config(p, "construct-3p")
    assert cfg.values == {"angle_tol": 0.02, "p_max": 10**5, "output": "", "format": "csv"}


@pytest.mark.parametrize("command", [c for c in SCHEMAS if c != "version"])
def test_normalize_is_idempotent(command):
    raw = {k: p.default for k, p in SCHEMAS[command].items() if p.default is not None}
    for k, p in SCHEMAS[command].items():
        if p.required:
            raw[k] = {"int": 5, "float": 0.5, "str": "x"}[p.kind]
    once = normalize(command, raw)
    twice = normalize(command, parse_config_text("\n".join(once.lines())))
    assert once == twice


def test_config_for_wrong_command(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("command=corr\nn=5\n")
    with pytest.raises(ArgumentError, match="not 'points'"):
        validate_config(p, "points")


def test_every_subcommand_runs(capsys):
    cases = [
        ["factor", "--n", "45"],
        ["points", "--n", "5"],
        ["census", "--X", "100"],
        ["measure", "--n", "65"],
        ["construct-pmq", "--w", "0.5"],
        ["construct-3p"],
        ["simulate", "--n", "5", "--trials", "20"],
        ["variance", "--n", "5", "--s", "0.2", "--trials", "100", "--kacrice", "false"],
        ["cf", "--n", "5", "--trials", "20", "--t", "0,1", "--bootstrap", "5"],
        ["stability", "--mode", "plane"],
        ["stability", "--seeds", "2"],
    ]
    for argv in cases:
        code, out, err = _run(argv, capsys)
        assert code == 0, (argv, err)
        assert out.strip() and err.startswith(argv[0] + ":")


def test_census_rows_flag_status(capsys):
    code, out, _ = _run(["census", "--X", "1105", "--l", "4", "--rule", "explicit", "--value", "1",
                         "--budget", "200"], capsys)
    rows = _rows(out)
    assert code == 0
    assert list(rows[0])[:7] == ["n", "N", "l", "K", "min_gap_sq", "count", "nonempty"]
    assert any(r["status"] == "budget" for r in rows)


def test_worker_count_does_not_change_output(capsys, monkeypatch):
    argv = ["simulate", "--n", "25", "--trials", "30", "--seed", "4"]
    monkeypatch.delenv("ARITHWAVE_THREADS", raising=False)
    a = _run(argv + ["--workers", "1"], capsys)[1]
    b = _run(argv + ["--workers", "3"], capsys)[1]
    monkeypatch.setenv("ARITHWAVE_THREADS", "2")
    c = _run(argv + ["--workers", "1"], capsys)[1]
    assert a == b == c


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "arithwave.cli", "version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
