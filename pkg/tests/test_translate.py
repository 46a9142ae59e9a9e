import random

import pytest

from lnsprove.budget import SearchBudget
from lnsprove.formula import Box, Imp, parse_formula
from lnsprove.lns import (
    BLOCK_MODE, END_ACTIVE, FREE, LNS, Joint, applicable, check_lns_derivation, is_block_form, lns_rules_for,
)
from lnsprove.logic import preset
from lnsprove.oracle import UnsupportedRule, check_seq_derivation, seq_prove
from lnsprove.randomgen import random_formula
from lnsprove.search import lns_prove
from lnsprove.sequent import Sequent, goal
from lnsprove.translate import (
    ExtractionError, NotBlockForm, NotEndActive, extract_sequent_derivation, simulate_sequent_derivation,
)
from lnsprove.tree import Node

LOGICS = ["K", "KD", "KT", "S4", "KT+S4", "E", "EC", "EN", "ECN", "M", "MC", "MN", "MCN", "M.P", "M.D4",
          "M.T", "M45", "K45", "M5", "MP5", "MD45", "KD45"]


def corpus(spec, seed, count):
    """Implications, half of them between boxed formulas, so that modal
    rules actually fire."""
    rng = random.Random(seed)
    idx = sorted(spec.indices)
    for _ in range(count):
        a = random_formula(rng, rng.randint(2, 5), indices=idx)
        b = random_formula(rng, rng.randint(2, 5), indices=idx)
        yield Imp(a, b) if rng.random() < 0.5 else Imp(Box(idx[-1], a), Box(idx[0], b))


@pytest.mark.parametrize("name", LOGICS)
def test_sequent_derivations_simulate_into_block_form(name):
    spec = preset(name)
    seen = 0
    for f in corpus(spec, 3, 40):
        r = seq_prove(goal(f), spec, SearchBudget(depth=16))
        if not r.proved:
            continue
        seen += 1
        d = simulate_sequent_derivation(r.derivation, spec)
        assert d.conclusion == LNS.single(goal(f))
        assert check_lns_derivation(d, spec, BLOCK_MODE), f
        assert is_block_form(d)
    assert seen >= 5


@pytest.mark.parametrize("name", LOGICS)
def test_block_derivations_extract_into_sequent_derivations(name):
    spec = preset(name)
    seen = 0
    for f in corpus(spec, 4, 40):
        r = lns_prove(goal(f), spec, BLOCK_MODE, SearchBudget(depth=40))
        if not r.proved:
            continue
        seen += 1
        d = extract_sequent_derivation(r.derivation, spec)
        assert d.conclusion == goal(f)
        assert check_seq_derivation(d, spec), f
    assert seen >= 5


@pytest.mark.parametrize("name", ["K", "S4", "MC", "M.D4", "K45"])
def test_there_and_back(name):
    spec = preset(name)
    for f in corpus(spec, 5, 30):
        r = seq_prove(goal(f), spec, SearchBudget(depth=16))
        if r.proved:
            back = extract_sequent_derivation(simulate_sequent_derivation(r.derivation, spec), spec)
            assert back.conclusion == goal(f)
            assert check_seq_derivation(back, spec)


def test_end_active_derivation_that_is_not_in_block_form():
    spec = preset("K")
    d = lns_prove(goal(parse_formula("[]p -> [](q -> p)")), spec, END_ACTIVE).derivation
    assert d.rules() == ["impR", "box_R", "impR", "box_L", "init"]
    with pytest.raises(NotBlockForm):
        extract_sequent_derivation(d, spec)


def _first(reg, g, rule, pos=None):
    for s in applicable(reg, g, only=rule):
        if pos is None or s.active == (pos,):
            return s.premises
    raise AssertionError(f"{rule} does not apply to {g}")


def test_work_in_an_earlier_component_is_not_end_active():
    spec = preset("K")
    reg = lns_rules_for(spec, FREE)
    root = LNS.single(Sequent((), (parse_formula("q -> q"), parse_formula("[](p -> p)"))))
    (opened,) = _first(reg, root, "box_R")
    (early,) = _first(reg, opened, "impR", pos=0)
    d = Node("box_R", root, (Node("impR", opened, (Node("init", early),)),))
    assert check_lns_derivation(d, spec, FREE)
    with pytest.raises(NotEndActive):
        extract_sequent_derivation(d, spec)


def test_extraction_needs_a_single_component_root():
    spec = preset("K")
    s = Sequent((parse_formula("p"),), (parse_formula("p"),))
    with pytest.raises(ExtractionError):
        extract_sequent_derivation(Node("init", LNS((s, s), (Joint(),))), spec)


def test_cube_simulation_refuses_structural_rules():
    spec = preset("EC")
    p = parse_formula("p")
    d = Node("WL", Sequent((p, p), (p,)), (Node("init", Sequent((p,), (p,))),))
    with pytest.raises(UnsupportedRule):
        simulate_sequent_derivation(d, spec)
    assert check_lns_derivation(simulate_sequent_derivation(d, spec, structural=True), spec, BLOCK_MODE, True)
