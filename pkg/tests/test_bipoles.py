from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lnsprove.bipoles import (
    BrokenRelation, ClauseSyntaxError, IllFormedTheory, MetaAtom, NonSpecifiableRule, alpha_equivalent,
    bipole_prove, bipole_successor_keys, check_bipole, check_bipole_derivation, check_theory, decode, emit_bipoles,
    emit_report, encode, format_theory, is_specifiable, lls_successor_keys, parse_clause, parse_ll, parse_theory,
    show_ll,
)
from lnsprove.budget import SearchBudget
from lnsprove.formula import parse_formula
from lnsprove.labelled import lls_prove, lls_rules_for
from lnsprove.lns import BOX_L_E, BOX_R_E
from lnsprove.logic import PRESET_NAMES, preset
from lnsprove.sequent import Sequent, goal
from lnsprove.tree import Node
from reachable import reachable_lls
from strategies import formulas

GOLDEN = Path(__file__).parent / "golden"
SPECIFIABLE = [n for n in PRESET_NAMES if is_specifiable(preset(n))]


def modal_part(spec, clauses):
    reg = lls_rules_for(spec)
    return [c for c in clauses if c.rule in reg.modal]


@pytest.mark.parametrize("name", ["K", "EC"])
def test_emitted_modal_clauses_match_the_golden_files(name):
    golden = parse_theory((GOLDEN / f"{name}.bipoles").read_text())
    spec = preset(name)
    emitted = modal_part(spec, emit_bipoles(spec))
    assert sorted(c.name for c in emitted) == sorted(c.name for c in golden)
    by_name = {c.name: c for c in emitted}
    for g in golden:
        assert alpha_equivalent(g, by_name[g.name]), (str(g), str(by_name[g.name]))


def test_ec_rule_names():
    assert {c.rule for c in modal_part(preset("EC"), emit_bipoles(preset("EC")))} == {BOX_R_E, BOX_L_E, "C"}


def test_monotone_t_is_not_specifiable():
    with pytest.raises(NonSpecifiableRule) as e:
        emit_bipoles(preset("M.T"))
    assert e.value.rule == "T"
    clauses, problems = emit_report(preset("M.T"))
    assert [p.rule for p in problems] == ["T"]
    assert clauses and all(c.rule != "T" for c in clauses)
    assert "M.T" not in SPECIFIABLE and "KT" in SPECIFIABLE


@pytest.mark.parametrize("name", SPECIFIABLE)
def test_every_emitted_clause_is_a_bipole(name):
    theory = emit_bipoles(preset(name))
    assert all(check_bipole(c) for c in theory)
    assert len(check_theory(theory)) == len(theory)
    assert parse_theory(format_theory(theory)) == theory


def test_multimodal_clauses_carry_relation_variants():
    names = {c.name for c in emit_bipoles(preset("KT+S4"))}
    assert {"box_R_1@0", "box_R_1@1", "box_R_1@2", "box_L_21", "4_22"} <= names
    assert "box_L_12" not in names


def test_alpha_equivalence():
    a = parse_clause("r: exists A,x,z. rght(x, []A)^ * rel(z,x)^ * (all y\\ rght(y, A) | rel(x,y))")
    b = parse_clause("r: exists F,u,v. rght(u, []F)^ * rel(v,u)^ * (all w\\ rght(w, F) | rel(u,w))")
    c = parse_clause("r: exists A,x,z. rght(x, []A)^ * rel(x,z)^ * (all y\\ rght(y, A) | rel(x,y))")
    d = parse_clause("r: exists z,x,A. rght(x, []A)^ * rel(z,x)^ * (all y\\ rght(y, A) | rel(x,y))")
    assert alpha_equivalent(a, b)
    assert alpha_equivalent(a, d)
    assert not alpha_equivalent(a, c)


def test_clause_grammar():
    # from loosest to tightest: + * & |
    f = parse_ll("rel(x,y)^ * rel(x,y) | relm(x,y) & rel(x,y) + relm(x,y)")
    assert show_ll(f) == "(rel(x,y)^ * ((rel(x,y) | relm(x,y)) & rel(x,y))) + relm(x,y)"
    assert parse_ll(show_ll(f)) == f


@pytest.mark.parametrize("text", [
    "no colon here", "r: rel(x)^", "r: foo(x,y)^", "r: rel(x,y)^ *", "r: rght(x, []~)^", "r: (rel(x,y)",
])
def test_clause_syntax_errors(text):
    with pytest.raises(ClauseSyntaxError):
        parse_clause(text)


@pytest.mark.parametrize("text", [
    "r: exists x,y. (rel(x,y)^ | rel(x,y))",
    "r: exists x,y. rel(x,y)^ * (rel(x,y) | rel(x,y)^)",
    "r: exists x. rel(x,y)^ * rel(x,x)",
    "r: exists x,y. rel(x,y)^ * rel(x,z)",
    "r: exists A,x,y. rel(x,y)^ * lft(y, A)",
    "r: exists x,y. rel(x,y)^ * (all x\\ rel(x,y))",
    "r: exists x,y. rel(x,y)^ * !(rel(x,y)^)",
])
def test_ill_formed_clauses_are_rejected(text):
    with pytest.raises(IllFormedTheory):
        check_theory([parse_clause(text)])


def test_bipole_shape_check():
    assert check_bipole(parse_clause("r: exists x,y. rel(x,y)^ * !(rel(x,y) & relm(x,y))"))
    assert check_bipole(parse_clause("r: exists x,y. rel(x,y)^ * ?rel(x,y)"))
    assert not check_bipole(parse_clause("r: exists x,y. rel(x,y)^ * ?(rel(x,y) | rel(x,y))"))
    assert not check_bipole(parse_clause("r: exists x,y. rel(x,y) | (rel(x,y)^ * rel(x,y))"))


def test_empty_theory_only_closes():
    assert bipole_prove(Sequent((parse_formula("p"),), (parse_formula("p"),)), []).proved
    assert not bipole_prove(goal(parse_formula("p -> p")), []).proved


@pytest.mark.parametrize("name", ["K", "KT+S4", "EC", "MN", "M.D4", "KD45"])
def test_encoding_round_trips(name):
    for h in reachable_lls(preset(name), 2, 40):
        assert decode(encode(h)) == h


def test_decode_needs_one_relation():
    with pytest.raises(BrokenRelation):
        decode([MetaAtom("lft", ("x1",), parse_formula("p"))])


@pytest.mark.parametrize("name", ["K", "KD", "S4", "KT+S4", "E", "ECN", "MC", "M.P", "M.D4", "M5", "KD45"])
def test_one_focused_step_is_one_labelled_step(name):
    spec = preset(name)
    theory = check_theory(emit_bipoles(spec))
    for h in reachable_lls(spec, 9, 60):
        assert bipole_successor_keys(theory, h) == lls_successor_keys(spec, h), str(h)


@settings(max_examples=30)
@given(formulas(max_leaves=5), st.sampled_from(["K", "S4", "EC", "MN", "M.P4", "M45"]))
def test_interpreter_agrees_with_labelled_search(f, name):
    spec = preset(name)
    budget = SearchBudget(depth=30)
    expected = lls_prove(goal(f), spec, budget).proved
    assert bipole_prove(goal(f), emit_bipoles(spec), budget, spec=spec).proved == expected


@pytest.mark.parametrize("name, text", [
    ("K", "[](p -> q) -> []p -> []q"), ("EC", "[]p & []q -> [](p & q)"), ("MN", "[]top"), ("K", "p | ~p"),
])
def test_unguided_interpreter(name, text):
    spec = preset(name)
    theory = emit_bipoles(spec)
    r = bipole_prove(goal(parse_formula(text)), theory, SearchBudget(depth=8))
    assert r.proved
    assert check_bipole_derivation(r.derivation, theory)
    bad = Node(r.derivation.rule, r.derivation.conclusion, r.derivation.premises[:0])
    assert not check_bipole_derivation(bad, theory)
    assert not bipole_prove(goal(parse_formula("[]p -> p")), emit_bipoles(preset("K")), SearchBudget(depth=8)).proved
