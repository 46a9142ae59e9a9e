"""Two-sided sequents over multisets and the propositional rules shared by
every calculus in the package."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .formula import And, Atom, Bottom, Box, Formula, Imp, Neg, Or, Top, parse_formula

Multiset = tuple[Formula, ...]


def ms(items: Iterable[Formula]) -> Multiset:
    return tuple(sorted(items))


def ms_remove(items: Multiset, f: Formula) -> Multiset:
    i = items.index(f)
    return items[:i] + items[i + 1:]


def ms_add(items: Multiset, *fs: Formula) -> Multiset:
    return ms(items + fs)


def ms_minus(a: Multiset, b: Multiset) -> Multiset | None:
    """``a - b`` as multisets, or None when ``b`` is not contained in ``a``."""
    ca, cb = Counter(a), Counter(b)
    for f, n in cb.items():
        if ca[f] < n:
            return None
        ca[f] -= n
    return ms(ca.elements())


def ms_str(items: Multiset) -> str:
    return ", ".join(str(f) for f in items)


@dataclass(frozen=True)
class Sequent:
    left: Multiset = ()
    right: Multiset = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "left", ms(self.left))
        object.__setattr__(self, "right", ms(self.right))

    def __str__(self) -> str:
        lhs, rhs = ms_str(self.left), ms_str(self.right)
        return f"{lhs} |- {rhs}".strip() if lhs or rhs else "|-"

    def add(self, left: Iterable[Formula] = (), right: Iterable[Formula] = ()) -> Sequent:
        return Sequent(self.left + tuple(left), self.right + tuple(right))

    def size(self) -> int:
        return sum(f.size() for f in self.left + self.right)


def goal(f: Formula) -> Sequent:
    return Sequent((), (f,))


def parse_sequent(text: str, indices: Iterable[int] | None = None) -> Sequent:
    """``A, B |- C``; text without a turnstile is a single formula goal."""
    if "|-" not in text:
        return goal(parse_formula(text, indices))
    lhs, _, rhs = text.partition("|-")

    def side(part: str) -> tuple[Formula, ...]:
        return tuple(parse_formula(x, indices) for x in part.split(",") if x.strip())

    return Sequent(side(lhs), side(rhs))


# propositional rules, applied to a single component

PROP_RULES = ("negL", "negR", "andL", "andR", "orL", "orR", "impL", "impR")
CLOSING_RULES = ("init", "botL", "topR")
STRUCTURAL_RULES = ("ConL", "ConR", "WL", "WR")


@dataclass(frozen=True)
class PropStep:
    rule: str
    principal: Formula
    side: str  # "L" or "R"
    premises: tuple[Sequent, ...]


def closing_rule(s: Sequent) -> str | None:
    for f in s.left:
        if isinstance(f, Bottom):
            return "botL"
    for f in s.right:
        if isinstance(f, Top):
            return "topR"
    atoms_left = {f for f in s.left if isinstance(f, Atom)}
    for f in s.right:
        if f in atoms_left:
            return "init"
    return None


def is_closing_instance(rule: str, s: Sequent) -> bool:
    if rule == "botL":
        return any(isinstance(f, Bottom) for f in s.left)
    if rule == "topR":
        return any(isinstance(f, Top) for f in s.right)
    if rule == "init":
        left = set(s.left)
        return any(isinstance(f, Atom) and f in left for f in s.right)
    return False


def decompose(s: Sequent, f: Formula, side: str) -> PropStep | None:
    """The propositional rule with principal ``f`` on ``side`` of ``s``."""
    if side == "L":
        rest = Sequent(ms_remove(s.left, f), s.right)
        match f:
            case Neg(body=a):
                return PropStep("negL", f, side, (rest.add(right=[a]),))
            case And(left=a, right=b):
                return PropStep("andL", f, side, (rest.add(left=[a, b]),))
            case Or(left=a, right=b):
                return PropStep("orL", f, side, (rest.add(left=[a]), rest.add(left=[b])))
            case Imp(left=a, right=b):
                return PropStep("impL", f, side, (rest.add(left=[b]), rest.add(right=[a])))
        return None
    rest = Sequent(s.left, ms_remove(s.right, f))
    match f:
        case Neg(body=a):
            return PropStep("negR", f, side, (rest.add(left=[a]),))
        case And(left=a, right=b):
            return PropStep("andR", f, side, (rest.add(right=[a]), rest.add(right=[b])))
        case Or(left=a, right=b):
            return PropStep("orR", f, side, (rest.add(right=[a, b]),))
        case Imp(left=a, right=b):
            return PropStep("impR", f, side, (rest.add(left=[a], right=[b]),))
    return None


def prop_steps(s: Sequent) -> Iterator[PropStep]:
    """Every propositional instance on ``s``, left side first, one per
    distinct principal formula."""
    for side, items in (("L", s.left), ("R", s.right)):
        seen = set()
        for f in items:
            if f in seen or isinstance(f, (Atom, Box, Bottom, Top)):
                continue
            seen.add(f)
            step = decompose(s, f, side)
            if step is not None:
                yield step


def unpacked(f: Formula, s: Sequent, side: str = "L") -> bool:
    """Whether the propositional decomposition of ``f`` on ``side`` is
    already present in ``s``, so adding ``f`` there would change nothing
    after decomposition up to contraction."""
    items = s.left if side == "L" else s.right
    if f in items:
        return True
    other = "R" if side == "L" else "L"
    match f:
        case Top():
            return side == "L"
        case Bottom():
            return side == "R"
        case Neg(body=a):
            return unpacked(a, s, other)
        case And(left=a, right=b):
            if side == "L":
                return unpacked(a, s, "L") and unpacked(b, s, "L")
            return unpacked(a, s, "R") or unpacked(b, s, "R")
        case Or(left=a, right=b):
            if side == "L":
                return unpacked(a, s, "L") or unpacked(b, s, "L")
            return unpacked(a, s, "R") and unpacked(b, s, "R")
        case Imp(left=a, right=b):
            if side == "L":
                return unpacked(a, s, "R") or unpacked(b, s, "L")
            return unpacked(a, s, "L") and unpacked(b, s, "R")
    return False


def first_prop_step(s: Sequent) -> PropStep | None:
    return next(prop_steps(s), None)


def structural_premises(rule: str, s: Sequent) -> Iterator[tuple[Formula, Sequent]]:
    """All instances of a contraction or weakening rule with conclusion ``s``."""
    if rule in ("ConL", "WL"):
        items, side = s.left, "L"
    else:
        items, side = s.right, "R"
    for f in sorted(set(items)):
        if rule.startswith("Con"):
            prem = s.add(left=[f]) if side == "L" else s.add(right=[f])
        else:
            prem = Sequent(ms_remove(s.left, f), s.right) if side == "L" else Sequent(s.left, ms_remove(s.right, f))
        yield f, prem


def check_prop(rule: str, concl: Sequent, premises: Sequence[Sequent]) -> bool:
    if rule in CLOSING_RULES:
        return not premises and is_closing_instance(rule, concl)
    if rule in STRUCTURAL_RULES:
        return len(premises) == 1 and any(p == premises[0] for _, p in structural_premises(rule, concl))
    if rule in PROP_RULES:
        side = rule[-1]
        for f in set(concl.left if side == "L" else concl.right):
            step = decompose(concl, f, side)
            if step is not None and step.rule == rule and list(step.premises) == list(premises):
                return True
    return False
