import json
import os
import shutil
import subprocess
import sys

import pytest

from codazzi_lab.cli import GOLDEN_ENV, RunConfig, UsageError, golden_name, main, parse_args

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")

GOLDEN_RUNS = [
    ["derive-table", "--n", "8", "--r", "4"],
    ["verify-case", "--case", "B", "--n", "8", "--r", "4", "--output", "json"],
    ["resultant", "--n", "7", "--r", "4", "--output", "json"],
    ["certify", "--n", "6", "--r", "3"],
]


def _run(argv, env=None):
    full = dict(os.environ)
    full.pop(GOLDEN_ENV, None)
    full.update(env or {})
    return subprocess.run(
        [sys.executable, "-m", "codazzi_lab", *argv], capture_output=True, text=True, env=full, check=False
    )


def test_parse_valid():
    cfg = parse_args(["derive-table", "--n", "8", "--r", "4"])
    assert cfg == RunConfig("derive-table", 8, 4)
    cfg = parse_args(["verify-case", "--case", "B", "--n", "8", "--r", "4", "--output", "json"])
    assert cfg.case == "B" and cfg.output == "json"
    assert parse_args(["certify", "--grid", "7..9"]).grid == (7, 9)


@pytest.mark.parametrize(
    "argv",
    [
        ["resultant", "--n", "4", "--r", "3"],
        ["resultant", "--n", "8", "--r", "7"],
        ["verify-case", "--n", "8", "--r", "4"],
        ["derive-table", "--n", "8", "--r", "4", "--case", "B"],
        ["resultant", "--n", "8", "--r", "4", "--grid", "7..8"],
        ["certify", "--grid", "seven"],
        ["resultant", "--n", "8", "--r", "4", "--convention", "metric"],
        ["bogus"],
    ],
)
def test_usage_errors(argv):
    with pytest.raises(UsageError):
        parse_args(argv)
    assert main(argv) == 2


def test_exit_codes(capsys):
    assert main(["derive-table", "--n", "8", "--r", "4"]) == 0
    assert main(["derive-table", "--n", "8", "--r", "4", "--convention", "metric"]) == 1
    assert main(["verify-case", "--case", "B", "--n", "8", "--r", "4"]) == 0
    assert "contradiction-as-expected: H = 0" in capsys.readouterr().out
    assert main(["certify", "--grid", "6..6", "--output", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["points"] == [] and out["schema"] == 1


def test_derive_table_markdown_layout(capsys):
    main(["derive-table", "--n", "8", "--r", "4"])
    lines = capsys.readouterr().out.splitlines()
    assert lines[2] == "| i | X | Y | Z | equation | status |"
    rows = [l for l in lines if l.startswith("| ") and l.endswith(" |") and l[2].isdigit()]
    assert len(rows) == 52
    assert all(l.endswith("| MATCH |") for l in rows)


def test_json_output_is_deterministic():
    argv = ["verify-case", "--case", "D", "--n", "7", "--r", "4", "--output", "json"]
    first, second = _run(argv), _run(argv)
    assert first.returncode == 0
    assert first.stdout == second.stdout
    assert json.loads(first.stdout)["schema"] == 1


@pytest.mark.parametrize("argv", GOLDEN_RUNS)
def test_golden_files(argv):
    proc = _run(argv, {GOLDEN_ENV: GOLDEN})
    assert proc.returncode == 0, proc.stderr
    cfg = parse_args(argv)
    with open(os.path.join(GOLDEN, golden_name(cfg)), encoding="utf-8") as fh:
        assert proc.stdout == fh.read()
    assert "matches" in proc.stderr


def test_golden_mismatch_exits_one(tmp_path):
    argv = GOLDEN_RUNS[0]
    name = golden_name(parse_args(argv))
    shutil.copy(os.path.join(GOLDEN, name), tmp_path / name)
    text = (tmp_path / name).read_text(encoding="utf-8").replace("| MATCH |", "| DIFF |", 1)
    (tmp_path / name).write_text(text, encoding="utf-8")
    proc = _run(argv, {GOLDEN_ENV: str(tmp_path)})
    assert proc.returncode == 1
    assert "+++ actual" in proc.stderr


def test_trace_flag_adds_trace(capsys):
    assert main(["verify-case", "--case", "C", "--n", "8", "--r", "4", "--output", "json", "--trace"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["trace"] and out["trace"][0]["step"] == 1
