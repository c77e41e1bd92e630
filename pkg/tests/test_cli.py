"""The command-line interface."""

import json
import pathlib

import pytest

from symsum.cli import main
from symsum.demos import GOMPF_STIPSICZ

EXPRS = pathlib.Path(__file__).parent.parent / "scripts" / "exprs"


def test_demo_gompf(capsys):
    assert main(["demo", "gompf-stipsicz"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out[-1] == "verdict: ~ (weak deformation) chi=47 sigma=-31"
    assert out[0].startswith("step 0: start")


def test_demo_json_trace(capsys):
    assert main(["demo", "assoc-sym", "--trace", "json"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    records = [json.loads(line) for line in out[:-1]]
    assert all(r["chi"] == 47 and r["sigma"] == -31 for r in records)
    assert out[-1] == "verdict: = (symplectomorphic) chi=47 sigma=-31"


def test_check_file(tmp_path, capsys):
    f = tmp_path / "proof.ssum"
    f.write_text(GOMPF_STIPSICZ, encoding="utf-8")
    assert main(["check", str(f)]) == 0
    assert "verdict: ~" in capsys.readouterr().out


def test_check_missing_file(capsys):
    assert main(["check", "does_not_exist.ssum"]) == 2
    assert "file error" in capsys.readouterr().err


def test_check_parse_error(tmp_path, capsys):
    f = tmp_path / "bad.ssum"
    f.write_text("lhs ???", encoding="utf-8")
    assert main(["check", str(f)]) == 2


def test_unknown_subcommand():
    assert main(["frobnicate"]) == 2


def test_version(capsys):
    assert main(["--version"]) == 0
    assert "symsum 0.1.0" in capsys.readouterr().out


def test_invariants_file(capsys):
    assert main(["invariants", str(EXPRS / "e4_cp2.expr")]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "chi=47 sigma=-31"


def test_polytope_figures(tmp_path, capsys):
    for figure, source in (
        ("triple", "fig_triple.expr"),
        ("pairsum", "fig_pairsum.expr"),
        ("foursum", "fig_foursum.expr"),
    ):
        out = tmp_path / f"{figure}.svg"
        assert (
            main(
                ["polytope", str(EXPRS / source), "--figure", figure, "-o", str(out)]
            )
            == 0
        )
        assert out.read_text(encoding="utf-8").startswith("<?xml")


def test_polytope_needs_enough_triples(tmp_path, capsys):
    out = tmp_path / "x.svg"
    code = main(
        ["polytope", str(EXPRS / "fig_triple.expr"), "--figure", "foursum", "-o", str(out)]
    )
    assert code == 2
    assert "needs 4" in capsys.readouterr().err


def test_proof_failure_exit_code(tmp_path, capsys):
    f = tmp_path / "fail.ssum"
    f.write_text(
        "atom A E(1) { F: g=1, i=0, a=1 }\n"
        "atom B E(2) { F: g=1, i=0, a=1 }\n"
        "lhs A rhs B target ~\n",
        encoding="utf-8",
    )
    assert main(["check", str(f)]) == 1
    assert "does not match" in capsys.readouterr().err
