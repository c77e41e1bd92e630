"""Parser, printer, and runner for the proof-script DSL."""

import random
import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symsum.core import EquivLevel, SymsumError
from symsum.demos import CORPUS, DEMOS, GOMPF_STIPSICZ, VERIFYING
from symsum.script import (
    AtomDecl,
    ScriptError,
    build_script,
    parse,
    parse_expr_file,
    print_script,
    run,
    serialize_expr,
)


def test_gompf_script_shape():
    ast = parse(GOMPF_STIPSICZ)
    atoms = [d for d in ast.decls if isinstance(d, AtomDecl)]
    assert len(atoms) == 5
    assert [d.name for d in atoms] == ["E4", "E3", "E1", "P", "Y"]
    assert ast.target == "~"
    assert [s.rule for s in ast.steps] == ["R9", "R2", "R7"]
    built = build_script(ast)
    assert built.target == EquivLevel.WEAK_DEFORMATION


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_print_parse_round_trip(name):
    src = CORPUS[name]
    ast = parse(src)
    printed = print_script(ast)
    reparsed = parse(printed)
    assert reparsed == ast
    assert print_script(reparsed) == printed


def test_corpus_is_big_enough():
    assert len(CORPUS) >= 10


@pytest.mark.parametrize("name", sorted(VERIFYING))
def test_corpus_verifies(name):
    assert run(VERIFYING[name]).code == 0


def test_round_trip_preserves_verdicts():
    for name, src in VERIFYING.items():
        printed = print_script(parse(src))
        assert run(printed).code == 0, name


def test_empty_input():
    with pytest.raises(ScriptError) as exc:
        parse("")
    assert "declaration" in str(exc.value)


def test_unresolved_identifier_in_expr():
    src = "lhs E9 rhs E9 target ~"
    r = run(src)
    assert r.code == 2
    assert "E9" in r.messages[0]


def test_duplicate_identifier():
    src = (
        "atom A E(1) { F: g=1, i=0, a=1 }\n"
        "atom A E(1) { F: g=1, i=0, a=1 }\n"
        "lhs A rhs A target ~"
    )
    with pytest.raises(ScriptError, match="duplicate"):
        parse(src)


def test_unknown_rule_id():
    src = "atom A E(1) { F: g=1, i=0, a=1 }\nlhs A rhs A target ~\nby R99 { }"
    with pytest.raises(ScriptError, match="R99"):
        parse(src)


def test_triple_with_unknown_mark():
    src = (
        "atom A E(1) { F: g=1, i=0, a=1 }\n"
        "triple t (A, F, missing)\n"
        "lhs A rhs A target ~"
    )
    r = run(src)
    assert r.code == 2
    assert "missing" in r.messages[0]


def test_error_positions():
    with pytest.raises(ScriptError) as exc:
        parse("atom A E(1) { F: g=1, i=0, a=1 }\nlhs A rhs A target ?")
    assert exc.value.line == 2
    assert exc.value.col > 0


def test_inadmissible_lhs_is_a_resolution_error():
    src = (
        "atom A E(3) { F3: g=1, i=0, a=1 }\n"
        "atom B E(1) { F1: g=1, i=0, a=2 }\n"
        "lhs sum(A, F3, B, F1) rhs sum(A, F3, B, F1) target ~"
    )
    r = run(src)
    assert r.code == 2
    assert "area" in r.messages[0]


def test_target_miss_reports_weak_steps():
    src = (
        "atom E3a E(3) { F3: g=1, i=0, a=2 }\n"
        "atom E3b E(3) { F3: g=1, i=0, a=1 }\n"
        "lhs E3a rhs E3b target =\n"
        "by deform { at = root, rescale = 1/2 }"
    )
    r = run(src)
    assert r.code == 1
    assert any("rescaled" in m for m in r.messages)


def test_serialize_expr_round_trips_through_expr_file():
    built = build_script(parse(GOMPF_STIPSICZ))
    text = serialize_expr(built.lhs)
    ast = parse_expr_file("expr " + text)
    from symsum.script import build_expr

    rebuilt = build_expr(ast.expr, {})
    assert rebuilt == built.lhs


TOKENS = [
    "atom", "triple", "lhs", "rhs", "target", "by", "rev", "sum", "sum4",
    "blowup", "thin", "thicken", "desing", "E", "CP2", "W", "Rational",
    "{", "}", "(", ")", ",", ";", ":", "=", "~", "+", "-", ".",
    "g", "i", "a", "perp", "label", "at", "size", "generic", "R2", "R9",
    "1", "2", "1/2", "0", "e", "eps", "X", "Sigma-3", '"note"',
]


def test_parser_fuzz_never_crashes():
    rng = random.Random(20260810)
    for _ in range(400):
        soup = " ".join(rng.choice(TOKENS) for _ in range(rng.randint(1, 40)))
        try:
            parse(soup)
        except ScriptError:
            pass
        except SymsumError:
            pass


@given(st.text(alphabet=string.printable, max_size=200))
@settings(max_examples=200)
def test_parser_fuzz_raw_text(text):
    try:
        parse(text)
    except ScriptError:
        pass


def test_demo_names():
    assert sorted(DEMOS) == [
        "assoc-sym",
        "blowup-trade",
        "en-induction",
        "gompf-stipsicz",
        "rational-blowdown",
    ]
