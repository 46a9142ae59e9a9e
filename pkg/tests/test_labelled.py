import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lnsprove.budget import SearchBudget
from lnsprove.formula import Atom, Box, parse_formula
from lnsprove.labelled import (
    LLS, REL, REL_E, REL_M, ROOT, Relation, check_lls_derivation, is_end_active_relation_set, lls_prove,
    lls_rules_for, naive_box_right, rule_schema, settle, successor_keys, tl_translate, translate_derivation,
    translated_successor_keys,
)
from lnsprove.lns import BIN, END_ACTIVE, LNS, MPART, PLAIN, Joint
from lnsprove.logic import ClassicalCube, Monotone, preset
from lnsprove.search import lns_prove
from lnsprove.sequent import Sequent, goal
from lnsprove.tree import Node
from reachable import reachable_lns
from strategies import formulas

p, q = Atom("p"), Atom("q")
BIJECTION_LOGICS = ["K", "KD", "KT", "S4", "KT+S4", "E", "EC", "EN", "ECN", "M", "MC", "MN", "MCN", "M.P",
                    "M.D4", "M.T", "M45", "K45", "MP5", "KD45"]


def test_single_component_translation():
    h = tl_translate(LNS.single(Sequent((p,), (p,))))
    assert h.relation == Relation(REL, ROOT, "x1")
    assert str(h) == "x0 R x1 | x1: p |- x1: p"


def test_the_relation_names_only_the_last_joint():
    comps = (Sequent((Box(0, p),), ()), Sequent((), ()), Sequent((), (p,)))
    h = tl_translate(LNS(comps, (Joint(PLAIN), Joint(PLAIN, 2))))
    assert str(h.relation) == "x2 R2 x3"
    assert h.at("x1") == comps[0] and h.at("x3") == comps[2]
    assert is_end_active_relation_set({h.relation})


def test_partial_joints_translate_to_their_own_relations():
    s = Sequent((), (p,))
    assert tl_translate(LNS((s, s), (Joint(MPART),))).relation.kind == REL_M
    h = tl_translate(LNS((s, s), (Joint(BIN),), side=Sequent((q,), ())))
    assert str(h.relation) == "x1 Re (x2,y2)"
    assert h.at("y2") == Sequent((q,), ())


def test_textbook_box_right_leaves_the_fragment():
    h = tl_translate(LNS.single(goal(Box(0, p))))
    rels = naive_box_right(h, "x1", Box(0, p))
    assert len(rels) == 2 and not is_end_active_relation_set(rels)


def test_settle_renames_targets_and_drops_finished_labels():
    before = LLS(Relation(REL, "x1", "x2"), [("x1", p)], [("x2", q)])
    after = LLS(Relation(REL, "x2", "x7"), [("x1", p)], [("x7", q)])
    settled = settle(before, after)
    assert settled.relation == Relation(REL, "x2", "x3")
    assert settled.at("x3") == Sequent((), (q,))
    assert settled.at("x1") == Sequent((p,), ())
    # both targets of a binary relation are gone once it is replaced
    before = LLS(Relation(REL_E, "x1", "x2", "y2"), [("y2", p)], [("x2", q)])
    after = LLS(Relation(REL, "x1", "x5"), [("y2", p), ("x5", p)], [("x2", q)])
    settled = settle(before, after)
    assert settled == LLS(Relation(REL, "x1", "x2"), [("x2", p)], [])


@pytest.mark.parametrize("name", BIJECTION_LOGICS)
def test_native_rules_match_translated_nested_rules(name):
    spec = preset(name)
    reg = lls_rules_for(spec)
    for g in reachable_lns(spec, 11, 60):
        h = tl_translate(g)
        native = successor_keys(reg, h)
        if isinstance(spec, Monotone) and h.relation.src == ROOT:
            # C on the root relation only rewrites the relation: an idle step
            native = {k for k in native if k[0] != "C"}
        assert native == translated_successor_keys(spec, g), str(g)


@settings(max_examples=30)
@given(formulas(max_leaves=5), st.sampled_from(["K", "S4", "EC", "MN", "M.D4", "M.T", "M45"]))
def test_labelled_search_agrees_with_nested_search(f, name):
    spec = preset(name)
    budget = SearchBudget(depth=30)
    assert lls_prove(goal(f), spec, budget).proved == lns_prove(goal(f), spec, END_ACTIVE, budget).proved


def test_labelled_derivations_are_checked():
    spec = preset("K")
    d = lls_prove(goal(parse_formula("[](p -> q) -> []p -> []q")), spec).derivation
    assert check_lls_derivation(d, spec)
    assert not check_lls_derivation(Node("init", d.conclusion), spec)
    assert not check_lls_derivation(d, preset("E"))


@pytest.mark.parametrize("name, text", [
    ("K", "[](p -> q) -> []p -> []q"), ("S4", "[]p -> [][]p"), ("EC", "[]p & []q -> [](p & q)"),
    ("MC", "[]p & []q -> [](p & q)"), ("M45", "<>p -> []<>p"), ("KT+S4", "[2]p -> [1][2]p"),
])
def test_translated_nested_derivations_have_the_same_shape(name, text):
    spec = preset(name)
    f = parse_formula(text)
    d = lns_prove(goal(f), spec, END_ACTIVE).derivation
    t = translate_derivation(d)
    assert t.rules() == d.rules()
    assert t.conclusion == tl_translate(LNS.single(goal(f)))
    reg = lls_rules_for(spec)
    for node in t.walk():
        h = node.conclusion
        key = (node.rule, tuple(settle(h, c.conclusion) for c in node.premises))
        assert key in successor_keys(reg, h)


def test_rule_schemas_are_documented():
    assert "R" in rule_schema(preset("K"), "box_R")
    assert rule_schema(preset("EC"), "C")
    assert set(lls_rules_for(preset("EC")).modal) >= {"box_R^e", "box_L^e", "C"}
    assert isinstance(preset("EC"), ClassicalCube)
