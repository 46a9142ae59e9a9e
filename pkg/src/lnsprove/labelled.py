"""Labelled line sequents: the translation from linear nested sequents,
native end-active rules and a prover driven by the shared strategy.

A labelled line sequent records only the last joint as its single
relation; formulas at labels that left the relation stay in the sequent
but can never become active again."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator

from .budget import ProofResult, SearchBudget
from .formula import BOT, Box, Formula
from .lns import (
    BIN, BOX_L_E, BOX_L_M, BOX_R_E, BOX_R_M, END_ACTIVE, LNS, MPART, PLAIN, Joint,
    _minus, _sub_multisets, applicable, lns_rules_for, sd_name,
)
from .logic import C, D, FIVE, FOUR, M, N, P, T, ClassicalCube, LogicSpec, Monotone, SimplyDependent
from .search import Move, View, run_search
from .sequent import (
    CLOSING_RULES, PROP_RULES, STRUCTURAL_RULES, Sequent, decompose, is_closing_instance,
    ms_remove, prop_steps, structural_premises,
)
from .tree import CheckReport, Node

REL, REL_M, REL_E = "R", "Rm", "Re"
ROOT = "x0"


@dataclass(frozen=True, order=True)
class Relation:
    kind: str
    src: str
    dst: str
    dst2: str = ""
    index: int = 0

    def __post_init__(self) -> None:
        if self.kind not in (REL, REL_M, REL_E):
            raise ValueError(f"unknown relation kind {self.kind!r}")
        if (self.kind == REL_E) != bool(self.dst2):
            raise ValueError("only the binary relation has a second target")
        names = [self.src, self.dst] + ([self.dst2] if self.dst2 else [])
        if len(set(names)) != len(names):
            raise ValueError("labels in a relation must be distinct")

    @property
    def labels(self) -> tuple[str, ...]:
        return (self.src, self.dst) + ((self.dst2,) if self.dst2 else ())

    def __str__(self) -> str:
        if self.kind == REL_E:
            return f"{self.src} Re ({self.dst},{self.dst2})"
        if self.kind == REL_M:
            return f"{self.src} Rm {self.dst}"
        return f"{self.src} R{self.index or ''} {self.dst}"


Labelled = tuple[str, Formula]


def label_number(label: str) -> int:
    m = re.fullmatch(r"[a-z]+(\d+)", label)
    return int(m.group(1)) if m else -1


@dataclass(frozen=True)
class LLS:
    relation: Relation
    left: tuple[Labelled, ...] = ()
    right: tuple[Labelled, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "left", tuple(sorted(self.left)))
        object.__setattr__(self, "right", tuple(sorted(self.right)))

    def __str__(self) -> str:
        lhs = ", ".join(f"{x}: {f}" for x, f in self.left)
        rhs = ", ".join(f"{x}: {f}" for x, f in self.right)
        return f"{self.relation} | {lhs} |- {rhs}".replace("  ", " ").rstrip()

    def labels(self) -> set[str]:
        return {x for x, _ in self.left + self.right} | set(self.relation.labels)

    def at(self, label: str) -> Sequent:
        return Sequent(tuple(f for x, f in self.left if x == label),
                       tuple(f for x, f in self.right if x == label))

    def put(self, label: str, s: Sequent) -> LLS:
        return LLS(self.relation,
                   [(x, f) for x, f in self.left if x != label] + [(label, f) for f in s.left],
                   [(x, f) for x, f in self.right if x != label] + [(label, f) for f in s.right])

    def relate(self, r: Relation) -> LLS:
        return LLS(r, self.left, self.right)

    def fresh_number(self) -> int:
        return 1 + max(label_number(x) for x in self.labels())


def tl_translate(g: LNS) -> LLS:
    """Components get x1..xn, the relation names the last joint (x0 R x1
    for a single component) and the second sequent of a binary marker
    gets y_n.  Block and intermediate markers become ordinary relations."""
    n = g.n
    left: list[Labelled] = []
    right: list[Labelled] = []
    for k, comp in enumerate(g.comps, 1):
        left += [(f"x{k}", f) for f in comp.left]
        right += [(f"x{k}", f) for f in comp.right]
    src, dst = f"x{n - 1}", f"x{n}"
    j = g.last_joint
    if j is None:
        rel = Relation(REL, src, dst)
    elif j.kind == MPART:
        rel = Relation(REL_M, src, dst)
    elif j.kind == BIN:
        side = f"y{n}"
        rel = Relation(REL_E, src, dst, side)
        assert g.side is not None
        left += [(side, f) for f in g.side.left]
        right += [(side, f) for f in g.side.right]
    else:
        rel = Relation(REL, src, dst, index=j.index)
    return LLS(rel, left, right)


def _joint_of(r: Relation) -> Joint:
    if r.kind == REL_M:
        return Joint(MPART)
    if r.kind == REL_E:
        return Joint(BIN)
    return Joint(PLAIN, r.index)


def settle(before: LLS, after: LLS) -> LLS:
    """Normal form of a premise ``after`` of a step from ``before``: labels
    that this step removed from the relation (other than its source) are
    inactive and dropped, and the new relation targets are renamed by
    their position on the line."""
    old, new = before.relation, after.relation
    dead = set(old.labels) - set(new.labels) - {old.src}
    k = label_number(new.src) + 1
    names = {new.dst: f"x{k}"}
    if new.dst2:
        names[new.dst2] = f"y{k}"
    # make room for the renamed targets
    for label in list(after.labels()):
        if label in names or label in dead:
            continue
        if label in names.values():
            dead.add(label)

    def keep(items: tuple[Labelled, ...]) -> list[Labelled]:
        return [(names.get(x, x), f) for x, f in items if x not in dead]

    rel = Relation(new.kind, new.src, names[new.dst], names.get(new.dst2, ""), new.index)
    return LLS(rel, keep(after.left), keep(after.right))


# rules

@dataclass(frozen=True)
class LlsStep:
    rule: str
    conclusion: LLS
    premises: tuple[LLS, ...]
    principal: Formula | None = None


@dataclass(frozen=True)
class LlsRegistry:
    spec: LogicSpec
    structural: bool
    names: tuple[str, ...]
    modal: tuple[str, ...]

    def __contains__(self, rule: str) -> bool:
        return rule in self.names

    def schema(self, rule: str) -> str:
        return rule_schema(self.spec, rule)


_SCHEMAS = {
    "init": "zRx, X, x:p |- Y, x:p   (p atomic)",
    "botL": "zRx, X, x:bot |- Y",
    "topR": "zRx, X |- Y, x:top",
    "negL": "zRx, X, x:~A |- Y  <=  zRx, X |- Y, x:A",
    "negR": "zRx, X |- Y, x:~A  <=  zRx, X, x:A |- Y",
    "andL": "zRx, X, x:A & B |- Y  <=  zRx, X, x:A, x:B |- Y",
    "andR": "zRx, X |- Y, x:A & B  <=  zRx, X |- Y, x:A   and   zRx, X |- Y, x:B",
    "orL": "zRx, X, x:A | B |- Y  <=  zRx, X, x:A |- Y   and   zRx, X, x:B |- Y",
    "orR": "zRx, X |- Y, x:A | B  <=  zRx, X |- Y, x:A, x:B",
    "impL": "zRx, X, x:A -> B |- Y  <=  zRx, X, x:B |- Y   and   zRx, X |- Y, x:A",
    "impR": "zRx, X |- Y, x:A -> B  <=  zRx, X, x:A |- Y, x:B",
    "ConL": "zRx, X, x:A |- Y  <=  zRx, X, x:A, x:A |- Y",
    "ConR": "zRx, X |- Y, x:A  <=  zRx, X |- Y, x:A, x:A",
    "WL": "zRx, X, x:A |- Y  <=  zRx, X |- Y",
    "WR": "zRx, X |- Y, x:A  <=  zRx, X |- Y",
    "box_R": "zRx, X |- Y, x:[]A  <=  xRy, X |- Y, y:A   (y fresh)",
    "box_L": "xRy, X, x:[]A |- Y  <=  xRy, X, y:A |- Y",
    "4": "xRy, X, x:[]A |- Y  <=  xRy, X, y:[]A |- Y",
    "d": "zRx, X, x:[]A |- Y  <=  xRy, X, y:A |- Y   (y fresh)",
    "t": "zRx, X, x:[]A |- Y  <=  zRx, X, x:A |- Y",
    BOX_R_E: "zRx, X |- Y, x:[]B  <=  x Re (y,w), X, w:B |- Y, y:B   (y, w fresh)",
    BOX_L_E: "z Re (x,w), X, z:[]A |- Y  <=  zRx, X, x:A |- Y   and   zRw, X |- Y, w:A",
    "N^e": "zRx, X |- Y, x:[]B  <=  xRy, X |- Y, y:B   (y fresh)",
    "M^e": "z Re (x,w), X |- Y  <=  z Re (x,w), X, w:bot |- Y",
    "C^e": "z Re (x,w), X, z:[]A |- Y  <=  z Re (x,w), X, x:A |- Y   and   zRw, X |- Y, w:A",
    BOX_R_M: "zRx, X |- Y, x:[]B  <=  x Rm y, X |- Y, y:B   (y fresh)",
    BOX_L_M: "z Rm x, X, z:[]B |- Y  <=  zRx, X, x:B |- Y",
    C: "zRx, X |- Y  <=  z Rm x, X |- Y",
    N: "z Rm x, X |- Y  <=  zRx, X |- Y",
    P: "zRx, X |- Y  <=  x Rm y, X |- Y   (y fresh)",
    D: "zRx, X, x:[]A |- Y  <=  x Rm y, X, y:A |- Y   (y fresh)",
    T: "zRx, X, x:S |- Y, x:P  <=  x Rm y, X, y:S |- Y, y:P   (y fresh)",
    FOUR: "z Rm x, X, z:[]A |- Y  <=  zRx, X, x:[]A |- Y",
    FIVE: "z Rm x, X |- Y, z:[]A  <=  zRx, X |- Y, x:[]A",
}


def rule_schema(spec: LogicSpec, rule: str) -> str:
    """A one-line display of a modal rule (conclusion <= premises)."""
    if isinstance(spec, SimplyDependent):
        for base in ("box_R", "box_L", "4", "d", "t"):
            if rule == base or rule.startswith(base + "_"):
                return _SCHEMAS[base]
    if isinstance(spec, ClassicalCube) and rule in (N, M, C):
        return _SCHEMAS[rule + "^e"]
    return _SCHEMAS.get(rule, rule)


def lls_rules_for(spec: LogicSpec, structural: bool | None = None) -> LlsRegistry:
    """The images of the end-active nested rules; names are shared."""
    reg = lns_rules_for(spec, END_ACTIVE, structural)
    return LlsRegistry(spec, reg.structural, reg.names, reg.modal)


def lls_successors(reg: LlsRegistry, h: LLS, only: str | None = None) -> list[LlsStep]:
    """Every end-active rule instance with conclusion ``h``."""
    out: list[LlsStep] = []
    names = set(reg.names)

    def want(rule: str) -> bool:
        return rule in names and (only is None or only == rule)

    def add(rule: str, prems: Iterable[LLS], principal: Formula | None = None) -> None:
        out.append(LlsStep(rule, h, tuple(prems), principal))

    r = h.relation
    x = r.dst
    cur = h.at(x)
    if r.kind == REL:
        for rule in CLOSING_RULES:
            if want(rule) and is_closing_instance(rule, cur):
                add(rule, ())
        if only is None or only in PROP_RULES:
            for step in prop_steps(cur):
                if want(step.rule):
                    add(step.rule, (h.put(x, p) for p in step.premises), step.principal)
        if reg.structural and (only is None or only in STRUCTURAL_RULES):
            for rule in STRUCTURAL_RULES:
                if want(rule):
                    for f, prem in structural_premises(rule, cur):
                        add(rule, (h.put(x, prem),), f)
    k = h.fresh_number()
    match reg.spec:
        case SimplyDependent():
            _sd(reg.spec, h, k, want, add)
        case ClassicalCube():
            _cube(h, k, want, add)
        case Monotone():
            _monotone(h, k, want, add)
    return out


def _boxes(items: Iterable[Formula]) -> list[Box]:
    return sorted({f for f in items if isinstance(f, Box)})


def _sd(spec: SimplyDependent, h: LLS, k: int, want, add) -> None:
    d, ups = spec.description, spec.upsets
    r = h.relation
    x, z = r.dst, r.src
    cur, prev = h.at(x), h.at(z)
    y = f"x{k}"
    for f in _boxes(cur.left):
        rule = sd_name(spec, "t", f.index)
        if want(rule):
            add(rule, (h.put(x, Sequent(ms_remove(cur.left, f) + (f.body,), cur.right)),), f)
    j = r.index
    if j in ups:
        for f in _boxes(prev.left):
            if f.index not in ups[j].up:
                continue
            rest = h.put(z, Sequent(ms_remove(prev.left, f), prev.right))
            rule = sd_name(spec, "box_L", f.index, j)
            if want(rule):
                add(rule, (rest.put(x, cur.add(left=[f.body])),), f)
            rule = sd_name(spec, "4", f.index, j)
            if f.index in ups[j].up4 and want(rule):
                add(rule, (rest.put(x, cur.add(left=[f])),), f)
    for f in _boxes(cur.right):
        rule = sd_name(spec, "box_R", f.index)
        if f.index in d.indices and want(rule):
            prem = h.put(x, Sequent(cur.left, ms_remove(cur.right, f)))
            add(rule, (prem.relate(Relation(REL, x, y, index=f.index)).put(y, Sequent((), (f.body,))),), f)
    for f in _boxes(cur.left):
        for j2 in sorted(d.indices):
            rule = sd_name(spec, "d", f.index, j2)
            if f.index in ups[j2].up and d.has(j2, D) and want(rule):
                prem = h.put(x, Sequent(ms_remove(cur.left, f), cur.right))
                add(rule, (prem.relate(Relation(REL, x, y, index=j2)).put(y, Sequent((f.body,), ())),), f)


def _cube(h: LLS, k: int, want, add) -> None:
    r = h.relation
    x = r.dst
    cur = h.at(x)
    if r.kind == REL:
        y, w = f"x{k}", f"y{k}"
        for f in _boxes(cur.right):
            if f.index != 0:
                continue
            base = h.put(x, Sequent(cur.left, ms_remove(cur.right, f)))
            if want(BOX_R_E):
                prem = base.relate(Relation(REL_E, x, y, w))
                add(BOX_R_E, (prem.put(y, Sequent((), (f.body,))).put(w, Sequent((f.body,), ())),), f)
            if want(N):
                add(N, (base.relate(Relation(REL, x, y)).put(y, Sequent((), (f.body,))),), f)
        return
    if r.kind != REL_E:
        return
    z, w = r.src, r.dst2
    prev, side = h.at(z), h.at(w)
    if want(M):
        add(M, (h.put(w, side.add(left=[BOT])),))
    for f in _boxes(prev.left):
        if f.index != 0:
            continue
        rest = h.put(z, Sequent(ms_remove(prev.left, f), prev.right))
        back = rest.relate(Relation(REL, z, w)).put(w, side.add(right=[f.body]))
        if want(BOX_L_E):
            add(BOX_L_E, (rest.relate(Relation(REL, z, x)).put(x, cur.add(left=[f.body])), back), f)
        if want(C):
            add(C, (rest.put(x, cur.add(left=[f.body])), back), f)


def _monotone(h: LLS, k: int, want, add) -> None:
    r = h.relation
    x, z = r.dst, r.src
    cur = h.at(x)
    y = f"x{k}"
    if r.kind == REL:
        def opened(rest: Sequent, new: Sequent) -> LLS:
            return h.put(x, rest).relate(Relation(REL_M, x, y)).put(y, new)

        for f in _boxes(cur.right):
            if f.index == 0 and want(BOX_R_M):
                add(BOX_R_M, (opened(Sequent(cur.left, ms_remove(cur.right, f)), Sequent((), (f.body,))),), f)
        if want(P):
            add(P, (opened(cur, Sequent()),))
        if want(D):
            for f in _boxes(cur.left):
                if f.index == 0:
                    add(D, (opened(Sequent(ms_remove(cur.left, f), cur.right), Sequent((f.body,), ())),), f)
        if want(T):
            for kept, moved in t_splits(cur):
                add(T, (opened(kept, moved),))
        if want(C):
            add(C, (h.relate(Relation(REL_M, z, x)),))
        return
    if r.kind != REL_M:
        return
    prev = h.at(z)
    done = h.relate(Relation(REL, z, x))
    for f in _boxes(prev.left):
        if f.index != 0:
            continue
        rest = done.put(z, Sequent(ms_remove(prev.left, f), prev.right))
        if want(BOX_L_M):
            add(BOX_L_M, (rest.put(x, cur.add(left=[f.body])),), f)
        if want(FOUR):
            add(FOUR, (rest.put(x, cur.add(left=[f])),), f)
    if want(FIVE):
        for f in _boxes(prev.right):
            if f.index == 0:
                rest = done.put(z, Sequent(prev.left, ms_remove(prev.right, f)))
                add(FIVE, (rest.put(x, cur.add(right=[f])),), f)
    if want(N):
        add(N, (done,))


def t_splits(s: Sequent) -> Iterator[tuple[Sequent, Sequent]]:
    """Every way to split ``s`` into a kept part and a moved part."""
    for sigma in _sub_multisets(s.left):
        for pi in _sub_multisets(s.right):
            yield Sequent(_minus(s.left, sigma), _minus(s.right, pi)), Sequent(sigma, pi)


def check_lls_derivation(d: Node, spec: LogicSpec, structural: bool | None = None) -> CheckReport:
    reg = lls_rules_for(spec, structural)
    for path, node in d.walk_paths():
        prems = tuple(p.conclusion for p in node.premises)
        if not any(s.premises == prems for s in lls_successors(reg, node.conclusion, only=node.rule)):
            return CheckReport(False, path, f"{node.rule} is not a legal labelled step below {node.conclusion}")
    return CheckReport(True)


def successor_keys(reg: LlsRegistry, h: LLS) -> set[tuple[str, tuple[LLS, ...]]]:
    """Native successors of ``h`` in normal form (see ``settle``)."""
    return {(s.rule, tuple(settle(h, p) for p in s.premises)) for s in lls_successors(reg, h)}


def translated_successor_keys(spec: LogicSpec, g: LNS,
                              structural: bool | None = None) -> set[tuple[str, tuple[LLS, ...]]]:
    """End-active nested successors of ``g``, translated and normalised."""
    reg = lns_rules_for(spec, END_ACTIVE, structural)
    h = tl_translate(g)
    return {(s.rule, tuple(settle(h, tl_translate(p)) for p in s.premises)) for s in applicable(reg, g)}


def naive_box_right(h: LLS, label: str, f: Box) -> set[Relation]:
    """The textbook labelled right box rule at any label: it adds ``label R
    y`` for a fresh ``y`` while keeping the existing relation, so the
    premise's relation set is no longer a singleton."""
    y = f"x{h.fresh_number()}"
    return {h.relation, Relation(REL, label, y, index=f.index)}


def is_end_active_relation_set(relations: set[Relation]) -> bool:
    return len(relations) == 1


# proof search

class LlsProvider:
    def __init__(self, spec: LogicSpec, structural: bool | None = None):
        self.spec = spec
        self.mode = END_ACTIVE
        self.registry = lls_rules_for(spec, structural)
        self.structural = self.registry.structural

    def view(self, h: LLS) -> View:
        r = h.relation
        cur = h.at(r.dst)
        return View(
            prev=h.at(r.src),
            cur=cur,
            joint=_joint_of(r),
            side=h.at(r.dst2) if r.kind == REL_E else None,
            nested=r.src != ROOT,
            locals=((0, cur),) if r.kind == REL else (),
        )

    def key(self, h: LLS) -> Hashable:
        r = h.relation
        side = h.at(r.dst2) if r.kind == REL_E else None
        return (h.at(r.src) if r.src != ROOT else None, h.at(r.dst), _joint_of(r), side)

    def apply(self, h: LLS, move: Move) -> tuple[LLS, ...] | None:
        rule = move.rule
        x = h.relation.dst
        cur = h.at(x)
        if rule in CLOSING_RULES:
            return () if is_closing_instance(rule, cur) else None
        if rule in PROP_RULES:
            step = decompose(cur, move.principal, move.side)
            return None if step is None else tuple(h.put(x, p) for p in step.premises)
        if rule == "ConL":
            return (h.put(x, cur.add(left=[move.principal])),)
        if rule == "ConR":
            return (h.put(x, cur.add(right=[move.principal])),)
        if rule == T and isinstance(self.spec, Monotone):
            f = move.principal
            y = f"x{h.fresh_number()}"
            rest = Sequent(ms_remove(cur.left, f), cur.right)
            return (h.put(x, Sequent((f,), ())).relate(Relation(REL_M, x, y)).put(y, rest),)
        for step in lls_successors(self.registry, h, only=rule):
            if move.principal is None or step.principal == move.principal:
                return step.premises
        return None


def as_labelled(goal: LLS | LNS | Sequent) -> LLS:
    if isinstance(goal, Sequent):
        goal = LNS.single(goal)
    return tl_translate(goal) if isinstance(goal, LNS) else goal


def lls_prove(goal: LLS | LNS | Sequent, spec: LogicSpec, budget: SearchBudget | None = None,
              structural: bool | None = None) -> ProofResult:
    """End-active labelled search; Proved results are re-checked."""
    budget = budget or SearchBudget()
    provider = LlsProvider(spec, structural)
    result = run_search(provider, as_labelled(goal), budget)
    if result.proved:
        report = check_lls_derivation(result.derivation, spec, provider.structural)
        if not report:
            raise AssertionError(f"search produced an illegal labelled derivation: {report.message}")
    return result


def translate_derivation(d: Node) -> Node:
    """Apply the translation to every structure of a nested derivation."""
    return d.map(tl_translate)
