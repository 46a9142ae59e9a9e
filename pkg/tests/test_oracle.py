import pytest
from hypothesis import given, settings

from lnsprove.budget import SearchBudget
from lnsprove.formula import Box, parse_formula
from lnsprove.logic import preset
from lnsprove.oracle import check_seq_derivation, seq_prove, seq_rules_for, structural_chain
from lnsprove.randomgen import random_formulas
from lnsprove.sequent import Sequent, goal
from lnsprove.tree import Node
from oracles import countermodel, tautology
from strategies import formulas

SEMANTIC_LOGICS = ["K", "KD", "KT", "S4", "K45", "KD45", "E", "M", "EC", "EN", "MC", "MN", "ECN", "MCN",
                   "M.P", "M.D", "M.4", "M.P4", "M.D4", "M5", "MP5", "M45", "MP45", "MD45"]


def modal(f):
    if isinstance(f, Box):
        return True
    return any(modal(getattr(f, a)) for a in ("body", "left", "right") if hasattr(f, a))


def propositional(max_leaves=8):
    return formulas(max_leaves=max_leaves).filter(lambda f: not modal(f))


@given(propositional())
def test_classical_fragment_matches_truth_tables(f):
    for name in ("K", "E", "M.P"):
        assert seq_prove(goal(f), preset(name)).proved == tautology(f)


@pytest.mark.parametrize("name", ["K", "S4", "EC", "MN", "M45", "KD45"])
@settings(max_examples=25)
@given(f=formulas(max_leaves=5))
def test_proved_formulas_have_no_small_countermodel(name, f):
    spec = preset(name)
    if seq_prove(goal(f), spec, SearchBudget(depth=16)).proved:
        assert countermodel(f, spec) is None


@pytest.mark.parametrize("name", SEMANTIC_LOGICS)
def test_seeded_corpus_matches_small_models(name):
    spec = preset(name)
    for f in random_formulas(3, 60, 7):
        proved = seq_prove(goal(f), spec).proved
        assert proved == (countermodel(f, spec) is None), f


@pytest.mark.parametrize("name, text, expected", [
    ("K", "[](p -> q) -> []p -> []q", True),
    ("K", "[]p -> p", False),
    ("KT", "[]p -> p", True),
    ("S4", "[]p -> [][]p", True),
    ("KD", "[]p -> <>p", True),
    ("E", "[](p & q) -> []p", False),
    ("M", "[](p & q) -> []p", True),
    ("MC", "[]p & []q -> [](p & q)", True),
    ("M", "[]top", False),
    ("MN", "[]top", True),
    ("M.P", "~[]bot", True),
    ("M.D", "[]p -> <>p", True),
    ("M.4", "[]p -> [][]p", True),
    ("M5", "<>p -> []<>p", True),
    ("MP5", "[]p -> []<>p", False),
    ("K45", "[](([]p) -> p)", True),
])
def test_known_facts(name, text, expected):
    spec = preset(name)
    result = seq_prove(goal(parse_formula(text)), spec, SearchBudget(depth=16))
    assert result.proved == expected
    if expected:
        assert check_seq_derivation(result.derivation, spec)


def test_checker_rejects_edits():
    spec = preset("K")
    d = seq_prove(goal(parse_formula("[](p -> q) -> []p -> []q")), spec).derivation
    assert check_seq_derivation(d, spec)
    assert not check_seq_derivation(Node("init", d.conclusion), spec)
    wrong = Node(d.rule, d.conclusion, tuple(Node("k", p.conclusion, p.premises) for p in d.premises))
    assert not check_seq_derivation(wrong, spec)
    assert not check_seq_derivation(d, preset("E"))


def test_registries():
    assert "k" in seq_rules_for(preset("K"))
    assert "t_1" in seq_rules_for(preset("KT+S4"))
    assert "Mn" in seq_rules_for(preset("MCN"))
    assert "N" not in seq_rules_for(preset("MCN"))
    assert "K45" in seq_rules_for(preset("K45"))


def test_structural_chain_weakens_and_contracts():
    p, q = parse_formula("p"), parse_formula("q")
    chain = structural_chain(Sequent((p, p, q), ()), Sequent((p,), ()))
    assert [r for r, _ in chain] == ["WL", "WL"]
    assert chain[0][1] == Sequent((p, p, q), ())
    assert chain[-1][1] == Sequent((p, q), ())
    chain = structural_chain(Sequent((p,), (q,)), Sequent((p, p), (q, q)))
    assert sorted(r for r, _ in chain) == ["ConL", "ConR"]
    assert structural_chain(Sequent((p,), ()), Sequent((q,), ())) is None
