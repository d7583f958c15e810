import json
import subprocess
import sys
from pathlib import Path

import pytest

from synstate.cli import main
from synstate.items import parse_item_file
from synstate.protocol import decode_response, encode_request


def run_cli(*argv):
    return main(list(argv))


def test_suites_list(capsys):
    assert run_cli("suites") == 0
    out = capsys.readouterr().out
    assert "subordination" in out and "mvrr" in out and "items=29" in out


def test_suites_export_round_trips(tmp_path, capsys):
    assert run_cli("suites", "--export", str(tmp_path)) == 0
    items = (tmp_path / "subordination.items").read_text()
    exp = parse_item_file(items)
    assert len(exp.items) == 23
    assert (tmp_path / "npz.grammar").exists()


def test_validate_builtin(capsys):
    assert run_cli("validate", "--experiment", "mvrr") == 0
    assert "valid" in capsys.readouterr().out


def test_validate_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad.items"
    bad.write_text("experiment: x\nfactors: f=a|b\nregions: end\nitem 1\n[a] w {end: .}\n")
    assert run_cli("validate", "--experiment", str(bad)) == 1


def test_validate_unknown(capsys):
    assert run_cli("validate", "--experiment", "nonesuch") == 1


def test_score_analyze_report_flow(tmp_path, capsys):
    out = tmp_path / "run"
    code = run_cli(
        "score",
        "--experiment", "subordination",
        "--scorer", "grammar:toy:subordination",
        "--out", str(out),
    )
    assert code == 0
    assert (out / "surprisals.tsv").exists()
    assert run_cli("analyze", "--out", str(out)) == 0
    assert (out / "effects.tsv").exists()
    assert run_cli("report", "--out", str(out)) == 0
    report = capsys.readouterr().out
    assert "matrix_licensing" in report and "significant" in report


def test_score_config_error(tmp_path, capsys):
    assert run_cli("score", "--experiment", "subordination", "--out", str(tmp_path / "x")) == 1
    assert run_cli("score", "--scorer", "grammar:toy:npz", "--out", str(tmp_path / "y")) == 1


def test_score_total_failure_exit_code(tmp_path):
    gpath = tmp_path / "tiny.grammar"
    gpath.write_text("start: S\nS -> q # 1.0\n")
    code = run_cli(
        "score",
        "--experiment", "subordination",
        "--scorer", f"grammar:{gpath}",
        "--out", str(tmp_path / "z"),
    )
    assert code == 3


def test_serve_stdio_subprocess():
    proc = subprocess.Popen(
        [sys.executable, "-m", "synstate", "serve",
         "--scorer", "grammar:toy:subordination", "--transport", "stdio"],
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
    )
    try:
        req = encode_request(1, ["The", "doctor", "studied", "the", "textbook", "."], True)
        proc.stdin.write((req + "\n").encode())
        proc.stdin.flush()
        resp = decode_response(proc.stdout.readline().decode())
        assert resp["status"] == "ok"
        assert len(resp["surprisals"]) == 6
        assert resp["eos"] is not None
    finally:
        proc.stdin.close()
        proc.wait(timeout=10)


def test_report_missing_bundle(tmp_path, capsys):
    assert run_cli("report", "--out", str(tmp_path / "none")) == 1
