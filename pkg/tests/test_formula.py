import pytest
from hypothesis import given

from lnsprove.formula import (
    BOT, TOP, And, Atom, Box, FormulaSyntaxError, Imp, Neg, Or, UndeclaredIndexError, conj, diamond, disj,
    parse_formula, show,
)
from lnsprove.sequent import Sequent, goal, parse_sequent
from strategies import formulas, sequents

p, q = Atom("p"), Atom("q")


@given(formulas(indices=(0, 1, 2)))
def test_show_then_parse_is_identity(f):
    assert parse_formula(show(f)) == f


@given(formulas())
def test_printing_is_stable(f):
    assert show(parse_formula(show(f))) == show(f)


@pytest.mark.parametrize("text, expected", [
    ("p -> q -> p", Imp(p, Imp(q, p))),
    ("p & q | p", Or(And(p, q), p)),
    ("~p & q", And(Neg(p), q)),
    ("[]p -> p", Imp(Box(0, p), p)),
    ("[2][1]p", Box(2, Box(1, p))),
    ("<>p", Neg(Box(0, Neg(p)))),
    ("<3>bot", Neg(Box(3, Neg(BOT)))),
    ("top", TOP),
    ("[ ] ( p )", Box(0, p)),
    ("A -> B", Imp(Atom("A"), Atom("B"))),
])
def test_parse_examples(text, expected):
    assert parse_formula(text) == expected


@pytest.mark.parametrize("text", ["", "p ->", "(p", "p q", "[x]p", "p $ q", "[]"])
def test_parse_errors_carry_a_position(text):
    with pytest.raises(FormulaSyntaxError) as e:
        parse_formula(text)
    assert e.value.position >= 0


def test_undeclared_index():
    with pytest.raises(UndeclaredIndexError) as e:
        parse_formula("[1]p -> [3]p", indices=[1, 2])
    assert e.value.index == 3
    assert e.value.position == 8
    assert parse_formula("[1]p -> [2]p", indices=[1, 2])


def test_formulas_are_values():
    assert Imp(p, q) == parse_formula("p -> q")
    assert hash(Box(1, p)) == hash(Box(1, Atom("p")))
    assert Box(1, p) != Box(2, p)
    assert len({p, Atom("p"), q}) == 2


def test_derived_connectives():
    assert diamond(p, 2) == parse_formula("<2>p")
    assert conj([]) == TOP and disj([]) == BOT
    assert conj([p, q]) == And(p, q)
    assert disj([p]) == p


@given(sequents())
def test_sequents_are_multisets(s):
    assert Sequent(tuple(reversed(s.left)), s.right) == s
    assert Sequent(s.left + s.left, s.right) != s or not s.left


def test_parse_sequent():
    assert parse_sequent("p, []q |- q, p") == Sequent((p, Box(0, q)), (q, p))
    assert parse_sequent("|- p") == goal(p)
    assert parse_sequent("p -> p") == goal(Imp(p, p))
    assert parse_sequent("p |-") == Sequent((p,), ())
