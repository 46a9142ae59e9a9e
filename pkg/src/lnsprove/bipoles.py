"""Labelled rules as focused linear logic bipole clauses.

A labelled line sequent is encoded as a multiset of ground atoms:
``lft(x, F)`` and ``rght(x, F)`` for its formulas and one relation atom.
A clause consumes its negated triggers, and each tensor factor of its
body becomes one premise: the remaining context plus the factor's atoms,
with universally bound labels instantiated fresh.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import count
from typing import Hashable, Iterator, Sequence

from .budget import Exhausted, NodeCapReached, Proved, ProofResult, SearchBudget, SearchStats
from .formula import BOT, TOP, And, Atom, Box, Bottom, Formula, Imp, Neg, Or, Top, parse_formula, show
from .labelled import (
    LLS, REL, REL_E, REL_M, LlsProvider, LlsStep, Relation, as_labelled, label_number, lls_rules_for, lls_successors,
)
from .lns import BOX_L_E, BOX_L_M, BOX_R_E, BOX_R_M, END_ACTIVE, sd_name
from .logic import C, D, FIVE, FOUR, M, N, P, T, ClassicalCube, LogicSpec, Monotone, SimplyDependent
from .search import Move, View, run_search
from .sequent import CLOSING_RULES, STRUCTURAL_RULES, Sequent, is_closing_instance
from .tree import CheckReport, Node


class IllFormedTheory(ValueError):
    pass


class NonSpecifiableRule(ValueError):
    def __init__(self, rule: str, reason: str = "the rule has no principal formula"):
        super().__init__(f"{rule}: {reason}")
        self.rule = rule


class ClauseSyntaxError(ValueError):
    pass


# linear logic syntax

@dataclass(frozen=True, order=True)
class MetaAtom:
    """``lft(x, F)``, ``rght(x, F)`` or a relation atom such as
    ``rel(x,y)``, ``rel_2(x,y)``, ``relm(x,y)`` and ``rele(x,y,z)``."""

    pred: str
    labels: tuple[str, ...]
    formula: Formula | None = None

    def __str__(self) -> str:
        if self.formula is not None:
            return f"{self.pred}({self.labels[0]}, {show(self.formula)})"
        return f"{self.pred}({','.join(self.labels)})"

    @property
    def is_relation(self) -> bool:
        return self.formula is None


@dataclass(frozen=True)
class Lit:
    atom: MetaAtom
    negated: bool = False


@dataclass(frozen=True)
class Tensor:
    items: tuple


@dataclass(frozen=True)
class Par:
    items: tuple


@dataclass(frozen=True)
class With:
    items: tuple


@dataclass(frozen=True)
class Plus:
    items: tuple


@dataclass(frozen=True)
class All:
    var: str
    body: object


@dataclass(frozen=True)
class Exists:
    vars: tuple[str, ...]
    body: object


@dataclass(frozen=True)
class Bang:
    body: object


@dataclass(frozen=True)
class Quest:
    body: object


LL = Lit | Tensor | Par | With | Plus | All | Exists | Bang | Quest


@dataclass(frozen=True)
class BipoleClause:
    name: str
    body: LL

    @property
    def rule(self) -> str:
        """The object rule; ``@k`` suffixes mark relation-index variants."""
        return self.name.split("@")[0]

    def __str__(self) -> str:
        return f"{self.name}: {show_ll(self.body)}"


def show_ll(f: LL) -> str:
    match f:
        case Lit(atom=a, negated=neg):
            return f"{a}^" if neg else str(a)
        case Exists(vars=vs, body=b):
            return f"exists {','.join(vs)}. {show_ll(b)}"
        case All(var=v, body=b):
            return f"all {v}\\ {show_ll(b)}"
        case Bang(body=b):
            return "!" + _operand(b)
        case Quest(body=b):
            return "?" + _operand(b)
        case Tensor(items=xs):
            return " * ".join(_operand(x) for x in xs)
        case Par(items=xs):
            return " | ".join(_operand(x) for x in xs)
        case With(items=xs):
            return " & ".join(_operand(x) for x in xs)
        case Plus(items=xs):
            return " + ".join(_operand(x) for x in xs)
    raise TypeError(f"not a linear logic formula: {f!r}")


def _operand(f: LL) -> str:
    return show_ll(f) if isinstance(f, Lit) else f"({show_ll(f)})"


class _ClauseParser:
    _WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, message: str) -> ClauseSyntaxError:
        return ClauseSyntaxError(f"{message} at position {self.pos}: {self.text!r}")

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def eat(self, s: str) -> None:
        if not self.peek(s):
            raise self.fail(f"expected {s!r}")
        self.pos += len(s)

    def word(self) -> str:
        self.skip()
        m = self._WORD.match(self.text, self.pos)
        if not m:
            raise self.fail("expected a name")
        self.pos = m.end()
        return m.group()

    def names(self) -> tuple[str, ...]:
        out = [self.word()]
        while self.peek(","):
            self.eat(",")
            out.append(self.word())
        return tuple(out)

    def keyword(self, kw: str) -> bool:
        self.skip()
        m = self._WORD.match(self.text, self.pos)
        return bool(m) and m.group() == kw

    def expr(self) -> LL:
        return self.chain("+", Plus, lambda: self.chain("*", Tensor, lambda: self.chain(
            "&", With, lambda: self.chain("|", Par, self.unary))))

    def chain(self, op: str, ctor, sub) -> LL:
        items = [sub()]
        while self.peek(op):
            self.eat(op)
            items.append(sub())
        return items[0] if len(items) == 1 else ctor(tuple(items))

    def unary(self) -> LL:
        if self.keyword("exists"):
            self.word()
            vs = self.names()
            self.eat(".")
            return Exists(vs, self.expr())
        if self.keyword("all"):
            self.word()
            v = self.word()
            self.eat("\\")
            return All(v, self.chain("|", Par, self.unary))
        if self.peek("!"):
            self.eat("!")
            return Bang(self.unary())
        if self.peek("?"):
            self.eat("?")
            return Quest(self.unary())
        if self.peek("("):
            self.eat("(")
            inner = self.expr()
            self.eat(")")
            return inner
        atom = self.atom()
        if self.peek("^"):
            self.eat("^")
            return Lit(atom, True)
        return Lit(atom)

    def atom(self) -> MetaAtom:
        pred = self.word()
        self.eat("(")
        if pred in ("lft", "rght"):
            label = self.word()
            self.eat(",")
            start, depth = self.pos, 0
            while self.pos < len(self.text):
                ch = self.text[self.pos]
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    if depth == 0:
                        break
                    depth -= 1
                self.pos += 1
            body = self.text[start:self.pos]
            self.eat(")")
            try:
                return MetaAtom(pred, (label,), parse_formula(body))
            except ValueError as e:
                raise self.fail(f"bad formula pattern {body.strip()!r} ({e})") from None
        if not re.fullmatch(r"rel(_\d+)?|relm|rele", pred):
            raise self.fail(f"unknown predicate {pred!r}")
        labels = self.names()
        self.eat(")")
        if len(labels) != (3 if pred == "rele" else 2):
            raise self.fail(f"wrong number of labels for {pred}")
        return MetaAtom(pred, labels)


def parse_ll(text: str) -> LL:
    p = _ClauseParser(text)
    out = p.expr()
    p.skip()
    if p.pos != len(text):
        raise p.fail("trailing input")
    return out


def parse_clause(line: str) -> BipoleClause:
    """``name: exists A,x,z. <atom>^ * <atom>^ * (all y\\ <atom> | <atom>)``"""
    name, sep, body = line.partition(":")
    if not sep or not name.strip():
        raise ClauseSyntaxError(f"expected 'name: clause', got {line!r}")
    return BipoleClause(name.strip(), parse_ll(body.strip()))


def parse_theory(text: str) -> list[BipoleClause]:
    return [parse_clause(line) for line in text.splitlines()
            if line.strip() and not line.lstrip().startswith("#")]


def format_theory(clauses: Sequence[BipoleClause]) -> str:
    return "".join(f"{c}\n" for c in clauses)


# the bipole grammar

def is_monopole(f: LL) -> bool:
    match f:
        case Lit(negated=neg):
            return not neg
        case Par(items=xs) | With(items=xs):
            return all(is_monopole(x) for x in xs)
        case All(body=b):
            return is_monopole(b)
        case Quest(body=b):
            return isinstance(b, Lit) and not b.negated
    return False


def _is_bipole(f: LL) -> bool:
    match f:
        case Lit(negated=True):
            return True
        case Tensor(items=xs) | Plus(items=xs):
            return all(_is_bipole(x) for x in xs)
        case Exists(body=b):
            return _is_bipole(b)
        case Bang(body=b):
            return is_monopole(b)
    return is_monopole(f)


def check_bipole(c: BipoleClause) -> bool:
    """Monopoles are built from atoms with negative connectives (``?`` only
    on atoms); a bipole combines monopoles and negated atoms with positive
    connectives (``!`` only on monopoles)."""
    return _is_bipole(c.body)


# alpha-equivalence

def _rename_formula(f: Formula, names: dict[str, str]) -> Formula:
    match f:
        case Atom(name=n):
            return Atom(names.get(n, n))
        case Neg(body=b):
            return Neg(_rename_formula(b, names))
        case Box(index=i, body=b):
            return Box(i, _rename_formula(b, names))
        case And(left=l, right=r) | Or(left=l, right=r) | Imp(left=l, right=r):
            return type(f)(_rename_formula(l, names), _rename_formula(r, names))
    return f


def _canon(f: LL, bound: dict[str, str], fresh: Iterator[str], pending: set[str]) -> LL:
    """Rename bound names by order of first occurrence.  Names in
    ``pending`` are bound by an enclosing existential block and get their
    canonical name when first met, so the block's own order is ignored."""

    def name(v: str) -> str:
        if v in pending and v not in bound:
            bound[v] = next(fresh)
        return bound.get(v, v)

    match f:
        case Lit(atom=a, negated=neg):
            labels = tuple(name(x) for x in a.labels)
            form = a.formula
            if form is not None:
                form = _rename_formula(form, {n: name(n) for n in sorted(form.atoms()) if n in pending or n in bound})
            return Lit(MetaAtom(a.pred, labels, form), neg)
        case Exists(vars=vs, body=b):
            inner = dict(bound)
            for v in vs:
                inner.pop(v, None)
            body = _canon(b, inner, fresh, pending | set(vs))
            return Exists(tuple(sorted(inner[v] for v in vs if v in inner)), body)
        case All(var=v, body=b):
            inner = dict(bound)
            inner[v] = next(fresh)
            return All(inner[v], _canon(b, inner, fresh, pending - {v}))
        case Bang(body=b) | Quest(body=b):
            return type(f)(_canon(b, bound, fresh, pending))
        case Tensor(items=xs) | Par(items=xs) | With(items=xs) | Plus(items=xs):
            return type(f)(tuple(_canon(x, bound, fresh, pending) for x in xs))
    raise TypeError(f"not a linear logic formula: {f!r}")


def alpha_equivalent(a: BipoleClause | LL, b: BipoleClause | LL) -> bool:
    fa = a.body if isinstance(a, BipoleClause) else a
    fb = b.body if isinstance(b, BipoleClause) else b

    def canon(f: LL) -> LL:
        return _canon(f, {}, (f"_v{k}" for k in count()), set())

    return canon(fa) == canon(fb)


# compilation to the interpreted step

@dataclass(frozen=True)
class Compiled:
    clause: BipoleClause
    formula_vars: frozenset[str]
    triggers: tuple[MetaAtom, ...]
    premises: tuple[tuple[tuple[str, ...], tuple[MetaAtom, ...]], ...]


def _flatten(f: LL, ctor) -> list[LL]:
    return [y for x in f.items for y in _flatten(x, ctor)] if isinstance(f, ctor) else [f]


def _group(f: LL, clause: str) -> tuple[tuple[str, ...], tuple[MetaAtom, ...]]:
    binders: list[str] = []
    while isinstance(f, All):
        binders.append(f.var)
        f = f.body
    atoms = []
    for item in _flatten(f, Par):
        if not (isinstance(item, Lit) and not item.negated):
            raise IllFormedTheory(f"{clause}: the interpreter only runs monopoles that are a par of atoms"
                                  " under universal binders")
        atoms.append(item.atom)
    return tuple(binders), tuple(atoms)


def compile_clause(c: BipoleClause) -> Compiled:
    if not check_bipole(c):
        raise IllFormedTheory(f"{c.name}: not a bipole")
    body = c.body
    evars: tuple[str, ...] = ()
    while isinstance(body, Exists):
        evars += body.vars
        body = body.body
    triggers: list[MetaAtom] = []
    groups = []
    for item in _flatten(body, Tensor):
        if isinstance(item, Lit) and item.negated:
            triggers.append(item.atom)
        else:
            groups.append(_group(item, c.name))
    formula_vars = set()
    label_vars = set()
    for a in triggers + [a for _, atoms in groups for a in atoms]:
        label_vars |= set(a.labels)
        if a.formula is not None:
            formula_vars |= a.formula.atoms() & set(evars)
    fresh = {v for binders, _ in groups for v in binders}
    if formula_vars & label_vars:
        raise IllFormedTheory(f"{c.name}: {sorted(formula_vars & label_vars)} used as label and formula")
    if fresh & set(evars):
        raise IllFormedTheory(f"{c.name}: a universal binder shadows an existential one")
    bound = set()
    for a in triggers:
        missing = set(a.labels) - set(evars)
        if missing:
            raise IllFormedTheory(f"{c.name}: free label variables {sorted(missing)}")
        bound |= set(a.labels)
        if a.formula is not None:
            bound |= a.formula.atoms() & formula_vars
    for binders, atoms in groups:
        for a in atoms:
            loose = set(a.labels) - bound - set(binders)
            if a.formula is not None:
                loose |= (a.formula.atoms() & formula_vars) - bound
            if loose:
                raise IllFormedTheory(f"{c.name}: {sorted(loose)} neither matched by a trigger nor fresh")
    return Compiled(c, frozenset(formula_vars), tuple(triggers), tuple(groups))


def check_theory(theory: Sequence[BipoleClause]) -> list[Compiled]:
    return [compile_clause(c) for c in theory]


# encoding labelled sequents

def _rel_pred(r: Relation) -> str:
    if r.kind == REL_M:
        return "relm"
    if r.kind == REL_E:
        return "rele"
    return "rel" if r.index == 0 else f"rel_{r.index}"


def encode(h: LLS) -> tuple[MetaAtom, ...]:
    atoms = [MetaAtom("lft", (x,), f) for x, f in h.left]
    atoms += [MetaAtom("rght", (x,), f) for x, f in h.right]
    atoms.append(MetaAtom(_rel_pred(h.relation), h.relation.labels))
    return tuple(sorted(atoms))


class BrokenRelation(ValueError):
    """A step left a context without exactly one relation atom."""


def decode(atoms: Sequence[MetaAtom]) -> LLS:
    rels = [a for a in atoms if a.is_relation]
    if len(rels) != 1:
        raise BrokenRelation(f"expected one relation atom, found {[str(a) for a in rels]}")
    a = rels[0]
    if a.pred == "relm":
        rel = Relation(REL_M, *a.labels)
    elif a.pred == "rele":
        rel = Relation(REL_E, *a.labels)
    else:
        index = int(a.pred[4:]) if a.pred.startswith("rel_") else 0
        rel = Relation(REL, *a.labels, index=index)
    return LLS(rel,
               [(b.labels[0], b.formula) for b in atoms if b.pred == "lft"],
               [(b.labels[0], b.formula) for b in atoms if b.pred == "rght"])


# the interpreter step

def _match_formula(pat: Formula, f: Formula, fvars: frozenset[str], env: dict) -> dict | None:
    if isinstance(pat, Atom) and pat.name in fvars:
        if pat.name in env:
            return env if env[pat.name] == f else None
        return {**env, pat.name: f}
    if type(pat) is not type(f):
        return None
    match pat:
        case Atom():
            return env if pat == f else None
        case Bottom() | Top():
            return env
        case Neg():
            return _match_formula(pat.body, f.body, fvars, env)
        case Box():
            return _match_formula(pat.body, f.body, fvars, env) if pat.index == f.index else None
        case And() | Or() | Imp():
            env = _match_formula(pat.left, f.left, fvars, env)
            return None if env is None else _match_formula(pat.right, f.right, fvars, env)
    return None


def _match_atom(pat: MetaAtom, a: MetaAtom, fvars: frozenset[str], env: dict) -> dict | None:
    if pat.pred != a.pred or len(pat.labels) != len(a.labels):
        return None
    for v, x in zip(pat.labels, a.labels):
        if v in env and env[v] != x:
            return None
        env = {**env, v: x}
    if pat.formula is None:
        return env
    return _match_formula(pat.formula, a.formula, fvars, env)


def _instantiate(pat: MetaAtom, env: dict, fvars: frozenset[str]) -> MetaAtom:
    labels = tuple(env[v] for v in pat.labels)
    if pat.formula is None:
        return MetaAtom(pat.pred, labels)
    return MetaAtom(pat.pred, labels, _substitute(pat.formula, env, fvars))


def _substitute(f: Formula, env: dict, fvars: frozenset[str]) -> Formula:
    match f:
        case Atom(name=n):
            return env[n] if n in fvars else f
        case Neg(body=b):
            return Neg(_substitute(b, env, fvars))
        case Box(index=i, body=b):
            return Box(i, _substitute(b, env, fvars))
        case And(left=l, right=r) | Or(left=l, right=r) | Imp(left=l, right=r):
            return type(f)(_substitute(l, env, fvars), _substitute(r, env, fvars))
    return f


@dataclass(frozen=True)
class BipoleStep:
    rule: str
    clause: str
    conclusion: LLS
    premises: tuple[LLS, ...]
    principal: Formula | None = None


_FRESH_PREFIXES = "xyzuvw"


def _matches(c: Compiled, ctx: tuple[MetaAtom, ...]) -> Iterator[tuple[dict, tuple[int, ...]]]:
    def go(k: int, env: dict, used: tuple[int, ...]):
        if k == len(c.triggers):
            yield env, used
            return
        for i, a in enumerate(ctx):
            if i in used:
                continue
            env2 = _match_atom(c.triggers[k], a, c.formula_vars, env)
            if env2 is not None:
                yield from go(k + 1, env2, used + (i,))

    yield from go(0, {}, ())


def clause_steps(c: Compiled, h: LLS) -> list[BipoleStep]:
    """Every focused step on clause ``c`` with conclusion ``h``."""
    ctx = encode(h)
    k = h.fresh_number()
    out: dict[tuple, BipoleStep] = {}
    for env, used in _matches(c, ctx):
        rest = [a for i, a in enumerate(ctx) if i not in used]
        prems = []
        for binders, atoms in c.premises:
            if len(binders) > len(_FRESH_PREFIXES):
                raise IllFormedTheory(f"{c.clause.name}: too many universal binders")
            local = {**env, **{v: f"{_FRESH_PREFIXES[n]}{k}" for n, v in enumerate(binders)}}
            prems.append(decode(rest + [_instantiate(a, local, c.formula_vars) for a in atoms]))
        principal = next((_substitute(t.formula, env, c.formula_vars) for t in c.triggers
                          if t.formula is not None), None)
        step = BipoleStep(c.clause.rule, c.clause.name, h, tuple(prems), principal)
        out.setdefault((step.rule, step.premises, principal), step)
    return list(out.values())


def end_label(h: LLS) -> str | None:
    """The label the built-in closures may use: the target of a plain relation."""
    return h.relation.dst if h.relation.kind == REL else None


def closing_steps(h: LLS) -> list[BipoleStep]:
    x = end_label(h)
    if x is None:
        return []
    s = h.at(x)
    return [BipoleStep(rule, rule, h, ()) for rule in CLOSING_RULES if is_closing_instance(rule, s)]


def bipole_successors(theory: Sequence[Compiled], h: LLS) -> list[BipoleStep]:
    out = closing_steps(h)
    for c in theory:
        out += clause_steps(c, h)
    return out


def rename_fresh(conclusion: LLS, premise: LLS) -> LLS:
    """Rename labels that the step introduced to placeholders in a fixed
    order, so that successor sets compare up to label renaming."""
    old = conclusion.labels()
    new = sorted(premise.labels() - old, key=lambda x: (label_number(x), x))
    names = {x: f"_n{k}" for k, x in enumerate(new)}
    r = premise.relation
    rel = Relation(r.kind, *(names.get(x, x) for x in r.labels), index=r.index) if r.kind != REL_E else \
        Relation(r.kind, names.get(r.src, r.src), names.get(r.dst, r.dst), names.get(r.dst2, r.dst2))
    return LLS(rel, [(names.get(x, x), f) for x, f in premise.left],
               [(names.get(x, x), f) for x, f in premise.right])


def bipole_successor_keys(theory: Sequence[Compiled], h: LLS) -> set[tuple[str, tuple[LLS, ...]]]:
    return {(s.rule, tuple(rename_fresh(h, p) for p in s.premises)) for s in bipole_successors(theory, h)}


def lls_successor_keys(spec: LogicSpec, h: LLS, structural: bool | None = None) -> set[tuple[str, tuple[LLS, ...]]]:
    reg = lls_rules_for(spec, structural)
    return {(s.rule, tuple(rename_fresh(h, p) for p in s.premises)) for s in lls_successors(reg, h)}


# emission

_PROP = {
    "negL": ("lft(x, ~A)", ["rght(x, A)"]),
    "negR": ("rght(x, ~A)", ["lft(x, A)"]),
    "andL": ("lft(x, A & B)", ["lft(x, A) | lft(x, B)"]),
    "andR": ("rght(x, A & B)", ["rght(x, A)", "rght(x, B)"]),
    "orL": ("lft(x, A | B)", ["lft(x, A)", "lft(x, B)"]),
    "orR": ("rght(x, A | B)", ["rght(x, A) | rght(x, B)"]),
    "impL": ("lft(x, A -> B)", ["lft(x, B)", "rght(x, A)"]),
    "impR": ("rght(x, A -> B)", ["lft(x, A) | rght(x, B)"]),
    "ConL": ("lft(x, A)", ["lft(x, A) | lft(x, A)"]),
    "ConR": ("rght(x, A)", ["rght(x, A) | rght(x, A)"]),
    "WL": ("lft(x, A)", [""]),
    "WR": ("rght(x, A)", [""]),
}


def _existentials(f: LL) -> tuple[str, ...]:
    """Formula variables, then labels, each in order of first occurrence;
    universally bound labels are excluded."""
    forms: list[str] = []
    labels: list[str] = []

    def walk(g: LL, fresh: frozenset[str]) -> None:
        match g:
            case Lit(atom=a):
                if a.formula is not None:
                    forms.extend(v for v in sorted(a.formula.atoms()) if v.isupper() and v not in forms)
                labels.extend(v for v in a.labels if v not in labels and v not in fresh)
            case All(var=v, body=b):
                walk(b, fresh | {v})
            case Tensor(items=xs) | Par(items=xs):
                for x in xs:
                    walk(x, fresh)

    walk(f, frozenset())
    return tuple(forms + labels)


def _make(name: str, triggers: Sequence[str], groups: Sequence[str]) -> BipoleClause:
    parts = [f"{t}^" for t in triggers] + [f"({g})" if ("|" in g or "all" in g) else g for g in groups]
    body = parse_ll(" * ".join(parts))
    return BipoleClause(name, Exists(_existentials(body), body))


def _local_clauses(name: str, rel: str, principal: str, groups: Sequence[str]) -> BipoleClause:
    keep = f"{rel}(z,x)"
    return _make(name, [principal, keep], [f"{g} | {keep}" if g else keep for g in groups])


def emit_report(spec: LogicSpec, structural: bool | None = None) -> tuple[list[BipoleClause], list[NonSpecifiableRule]]:
    """Clauses for every specifiable rule of the labelled system, and one
    error per rule that cannot be written as a bipole."""
    reg = lls_rules_for(spec, structural)
    names = set(reg.names)
    out: list[BipoleClause] = []
    problems: list[NonSpecifiableRule] = []

    if isinstance(spec, SimplyDependent):
        d, ups = spec.description, spec.upsets
        idx = sorted(d.indices)
        rels = sorted({0} | set(idx))
        preds = {j: "rel" if j == 0 else f"rel_{j}" for j in rels}

        def variants(name: str, build) -> None:
            for j in rels:
                tag = f"@{j}" if len(rels) > 1 else ""
                out.append(build(name + tag, preds[j]))
    else:
        def variants(name: str, build) -> None:
            out.append(build(name, "rel"))

    for rule, (principal, groups) in _PROP.items():
        if rule in names:
            variants(rule, lambda n, r, p=principal, g=groups: _local_clauses(n, r, p, g))

    match spec:
        case SimplyDependent():
            for i in idx:
                box = "[]" if i == 0 else f"[{i}]"
                rule = sd_name(spec, "box_R", i)
                variants(rule, lambda n, r, box=box, i=i: _make(
                    n, [f"rght(x, {box}A)", f"{r}(z,x)"], [f"all y\\ rght(y, A) | {preds[i]}(x,y)"]))
                if sd_name(spec, "t", i) in names:
                    variants(sd_name(spec, "t", i), lambda n, r, box=box: _make(
                        n, [f"lft(x, {box}A)", f"{r}(z,x)"], [f"lft(x, A) | {r}(z,x)"]))
                for j in idx:
                    if i not in ups[j].up:
                        continue
                    rj = preds[j]
                    out.append(_make(sd_name(spec, "box_L", i, j), [f"lft(x, {box}A)", f"{rj}(x,y)"],
                                     [f"lft(y, A) | {rj}(x,y)"]))
                    if i in ups[j].up4:
                        out.append(_make(sd_name(spec, "4", i, j), [f"lft(x, {box}A)", f"{rj}(x,y)"],
                                         [f"lft(y, {box}A) | {rj}(x,y)"]))
                    if d.has(j, D):
                        variants(sd_name(spec, "d", i, j), lambda n, r, box=box, rj=rj: _make(
                            n, [f"lft(x, {box}A)", f"{r}(z,x)"], [f"all y\\ lft(y, A) | {rj}(x,y)"]))
        case ClassicalCube():
            table = {
                BOX_R_E: (["rght(x, []B)", "rel(w,x)"], ["all y\\ all z\\ rght(y, B) | lft(z, B) | rele(x,y,z)"]),
                BOX_L_E: (["lft(x, []A)", "rele(x,y,z)"], ["lft(y, A) | rel(x,y)", "rght(z, A) | rel(x,z)"]),
                N: (["rght(x, []B)", "rel(w,x)"], ["all y\\ rght(y, B) | rel(x,y)"]),
                M: (["rele(x,y,z)"], ["lft(z, bot) | rele(x,y,z)"]),
                C: (["lft(x, []A)", "rele(x,y,z)"], ["lft(y, A) | rele(x,y,z)", "rght(z, A) | rel(x,z)"]),
            }
            out += [_make(rule, *table[rule]) for rule in table if rule in names]
        case Monotone():
            table = {
                BOX_R_M: (["rght(x, []B)", "rel(z,x)"], ["all y\\ rght(y, B) | relm(x,y)"]),
                BOX_L_M: (["lft(z, []B)", "relm(z,x)"], ["lft(x, B) | rel(z,x)"]),
                C: (["rel(z,x)"], ["relm(z,x)"]),
                N: (["relm(z,x)"], ["rel(z,x)"]),
                P: (["rel(z,x)"], ["all y\\ relm(x,y)"]),
                D: (["lft(x, []A)", "rel(z,x)"], ["all y\\ lft(y, A) | relm(x,y)"]),
                FOUR: (["lft(z, []B)", "relm(z,x)"], ["lft(x, []B) | rel(z,x)"]),
                FIVE: (["rght(z, []B)", "relm(z,x)"], ["rght(x, []B) | rel(z,x)"]),
            }
            for rule in reg.names:
                if rule in table:
                    out.append(_make(rule, *table[rule]))
                elif rule == T:
                    problems.append(NonSpecifiableRule(
                        T, "it moves an arbitrary part of the end component and has no principal formula"))
    for c in out:
        assert check_bipole(c), c
    return out, problems


def emit_bipoles(spec: LogicSpec, structural: bool | None = None) -> list[BipoleClause]:
    """The bipole theory of the labelled system for ``spec``; raises
    NonSpecifiableRule if some rule cannot be specified."""
    clauses, problems = emit_report(spec, structural)
    if problems:
        raise problems[0]
    return clauses


def is_specifiable(spec: LogicSpec) -> bool:
    return not emit_report(spec)[1]


# proving

class BipoleProvider:
    """Runs the shared strategy; every move is carried out by the
    interpreter on a clause of the theory."""

    def __init__(self, theory: Sequence[Compiled], spec: LogicSpec, structural: bool | None = None):
        self.theory = list(theory)
        self.guide = LlsProvider(spec, structural)
        self.spec = spec
        self.mode = END_ACTIVE
        self.structural = self.guide.structural
        self.by_rule: dict[str, list[Compiled]] = {}
        for c in self.theory:
            self.by_rule.setdefault(c.clause.rule, []).append(c)

    def view(self, h: LLS) -> View:
        return self.guide.view(h)

    def key(self, h: LLS) -> Hashable:
        return self.guide.key(h)

    def apply(self, h: LLS, move: Move) -> tuple[LLS, ...] | None:
        if move.rule in CLOSING_RULES:
            return () if any(s.rule == move.rule for s in closing_steps(h)) else None
        for c in self.by_rule.get(move.rule, ()):
            for step in clause_steps(c, h):
                if move.principal is not None and step.principal != move.principal:
                    continue
                if move.rule in STRUCTURAL_RULES and not _only_touches(h, step, h.relation.dst):
                    continue
                return step.premises
        return None


def _only_touches(h: LLS, step: LlsStep, x: str) -> bool:
    return all(p.relation == h.relation and all(p.at(y) == h.at(y) for y in h.labels() if y != x)
               for p in step.premises)


def _plain_search(theory: Sequence[Compiled], goal: LLS, budget: SearchBudget) -> ProofResult:
    """Depth-bounded search over every clause application."""
    stats = SearchStats()
    failed: dict[LLS, int] = {}

    def prove(h: LLS, depth: int, level: int) -> Node | None:
        stats.nodes += 1
        stats.max_depth = max(stats.max_depth, level)
        if stats.nodes > budget.node_cap:
            raise NodeCapReached
        for s in closing_steps(h):
            return Node(s.rule, h)
        if depth <= 0 or failed.get(h, -1) >= depth:
            return None
        for c in theory:
            for step in clause_steps(c, h):
                cost = 0 if step.rule in STRUCTURAL_RULES else 1
                if cost == 0 and depth <= 1:
                    continue
                subs = []
                for p in step.premises:
                    sub = prove(p, depth - max(cost, 1), level + 1)
                    if sub is None:
                        break
                    subs.append(sub)
                else:
                    return Node(step.rule, h, tuple(subs))
        failed[h] = depth
        return None

    try:
        node = prove(goal, budget.depth, 1)
    except NodeCapReached:
        stats.node_cap_hit = True
        return Exhausted(stats)
    return Proved(node, stats) if node is not None else Exhausted(stats)


def bipole_prove(goal: LLS | Sequent, theory: Sequence[BipoleClause], budget: SearchBudget | None = None,
                 spec: LogicSpec | None = None, structural: bool | None = None) -> ProofResult:
    """Prove ``goal`` with the interpreter.  With ``spec`` the moves are
    chosen by the shared strategy; without it every clause is tried up to
    the depth bound."""
    budget = budget or SearchBudget()
    compiled = check_theory(theory)
    h = as_labelled(goal)
    if spec is None:
        result = _plain_search(compiled, h, budget)
    else:
        result = run_search(BipoleProvider(compiled, spec, structural), h, budget)
    if result.proved:
        report = check_bipole_derivation(result.derivation, compiled)
        if not report:
            raise AssertionError(f"interpreter produced an illegal derivation: {report.message}")
    return result


def check_bipole_derivation(d: Node, theory: Sequence[Compiled] | Sequence[BipoleClause]) -> CheckReport:
    compiled = [c if isinstance(c, Compiled) else compile_clause(c) for c in theory]
    for path, node in d.walk_paths():
        prems = tuple(p.conclusion for p in node.premises)
        steps = bipole_successors(compiled, node.conclusion)
        if not any(s.rule == node.rule and s.premises == prems for s in steps):
            return CheckReport(False, path, f"{node.rule} is not a focused step below {node.conclusion}")
    return CheckReport(True)
