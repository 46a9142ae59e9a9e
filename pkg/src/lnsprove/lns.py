"""Linear nested sequents, their rule registries in three modes, formula
interpretation and derivation checking."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from itertools import product
from typing import Iterable, Iterator

from .formula import BOT, Box, Formula, Or, Imp, conj, disj
from .logic import (
    C, D, FIVE, FOUR, M, N, P, T,
    ClassicalCube, LogicSpec, Monotone, SimplyDependent,
)
from .sequent import (
    CLOSING_RULES, PROP_RULES, STRUCTURAL_RULES, Sequent,
    is_closing_instance, ms, ms_remove, prop_steps, structural_premises,
)
from .tree import CheckReport, Node

PLAIN, BLOCK, MPART, INTER, BIN = "plain", "block", "m", "r", "e"
PARTIAL_KINDS = frozenset({BLOCK, MPART, INTER, BIN})
_MARK = {PLAIN: "//", BLOCK: "//b", MPART: "//m", INTER: "//r", BIN: "//e"}

FREE, END_ACTIVE, BLOCK_MODE = "free", "end_active", "block"
MODES = (FREE, END_ACTIVE, BLOCK_MODE)


class MalformedLNS(ValueError):
    pass


class PartialMarkerUninterpretable(ValueError):
    pass


@dataclass(frozen=True)
class Joint:
    kind: str = PLAIN
    index: int = 0

    def __post_init__(self) -> None:
        if self.kind not in _MARK:
            raise MalformedLNS(f"unknown nesting marker {self.kind!r}")

    @property
    def partial(self) -> bool:
        return self.kind in PARTIAL_KINDS

    def __str__(self) -> str:
        return _MARK[self.kind] + (str(self.index) if self.index else "")


@dataclass(frozen=True)
class LNS:
    """Components joined by nesting markers.  When the last joint is the
    binary marker, ``side`` holds its second sequent."""

    comps: tuple[Sequent, ...]
    joints: tuple[Joint, ...] = ()
    side: Sequent | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "comps", tuple(self.comps))
        object.__setattr__(self, "joints", tuple(self.joints))
        if not self.comps:
            raise MalformedLNS("a linear nested sequent needs at least one component")
        if len(self.joints) != len(self.comps) - 1:
            raise MalformedLNS("need exactly one joint between consecutive components")
        if any(j.partial for j in self.joints[:-1]):
            raise MalformedLNS("partial markers may only occur as the last joint")
        binary = bool(self.joints) and self.joints[-1].kind == BIN
        if binary != (self.side is not None):
            raise MalformedLNS("the binary marker needs exactly one side sequent")

    @classmethod
    def single(cls, s: Sequent) -> LNS:
        return cls((s,))

    @property
    def n(self) -> int:
        return len(self.comps)

    @property
    def last(self) -> Sequent:
        return self.comps[-1]

    @property
    def last_joint(self) -> Joint | None:
        return self.joints[-1] if self.joints else None

    @property
    def partial(self) -> bool:
        return bool(self.joints) and self.joints[-1].partial

    def put(self, k: int, s: Sequent) -> LNS:
        comps = list(self.comps)
        comps[k] = s
        return replace(self, comps=tuple(comps))

    def put_pair(self, k: int, a: Sequent, b: Sequent) -> LNS:
        comps = list(self.comps)
        comps[k], comps[k + 1] = a, b
        return replace(self, comps=tuple(comps))

    def extend(self, joint: Joint, s: Sequent, side: Sequent | None = None) -> LNS:
        """Replace nothing; append a component after the last one."""
        return LNS(self.comps + (s,), self.joints + (joint,), side)

    def open_after(self, rest: Sequent, joint: Joint, new: Sequent, side: Sequent | None = None) -> LNS:
        """Set the last component to ``rest`` and append ``new``."""
        return LNS(self.comps[:-1] + (rest, new), self.joints + (joint,), side)

    def set_last_joint(self, joint: Joint, side: Sequent | None = None) -> LNS:
        return LNS(self.comps, self.joints[:-1] + (joint,), side)

    def __str__(self) -> str:
        parts = [str(self.comps[0])]
        for k, j in enumerate(self.joints, 1):
            if j.kind == BIN:
                parts.append(f"{j}({self.comps[k]}; {self.side})")
            else:
                parts.append(f"{j} {self.comps[k]}")
        return " ".join(parts)


# rule names

def _mono(spec: LogicSpec) -> bool:
    return spec.indices == frozenset({0})


def sd_name(spec: LogicSpec, base: str, *ids: int) -> str:
    if _mono(spec):
        return base
    sep = "" if all(i < 10 for i in ids) else ","
    return f"{base}_{sep.join(str(i) for i in ids)}"


BOX_R_E, BOX_L_E, BOX_R_M, BOX_L_M, CLOSE = "box_R^e", "box_L^e", "box_R^m", "box_L^m", "close"


@dataclass(frozen=True)
class LnsRegistry:
    spec: LogicSpec
    mode: str
    structural: bool
    modal: tuple[str, ...]

    @property
    def names(self) -> tuple[str, ...]:
        out = CLOSING_RULES + PROP_RULES
        if self.structural:
            out += STRUCTURAL_RULES
        return out + self.modal

    def __contains__(self, rule: str) -> bool:
        return rule in self.names


def lns_rules_for(spec: LogicSpec, mode: str = END_ACTIVE, structural: bool | None = None) -> LnsRegistry:
    """Rule registry; Con/W are included by default except for the
    classical cube, where they are admissible."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if structural is None:
        structural = not isinstance(spec, ClassicalCube)
    names: list[str] = []
    match spec:
        case SimplyDependent(description=d):
            ups = spec.upsets
            idx = sorted(d.indices)
            names += [sd_name(spec, "box_R", i) for i in idx]
            names += [sd_name(spec, "box_L", i, j) for i in idx for j in idx if i in ups[j].up]
            names += [sd_name(spec, "d", i, j) for i in idx for j in idx if i in ups[j].up and d.has(j, D)]
            names += [sd_name(spec, "t", i) for i in idx if d.has(i, T)]
            names += [sd_name(spec, "4", i, j) for i in idx for j in idx if i in ups[j].up4]
            if mode == BLOCK_MODE:
                names.append(CLOSE)
        case ClassicalCube(axioms=ax):
            names += [BOX_R_E, BOX_L_E] + [a for a in (N, M, C) if a in ax]
        case Monotone(axioms=ax):
            names += [BOX_R_M, BOX_L_M] + [a for a in (C, N, P, D, T, FOUR, FIVE) if a in ax]
            if mode == BLOCK_MODE and C in ax:
                names.append(CLOSE)
        case _:
            raise TypeError(f"unknown logic spec {spec!r}")
    return LnsRegistry(spec, mode, structural, tuple(names))


def uses_intermediate(reg: LnsRegistry) -> bool:
    return reg.mode == BLOCK_MODE and isinstance(reg.spec, Monotone) and C in reg.spec.axioms


# rule instances

@dataclass(frozen=True)
class LnsStep:
    rule: str
    conclusion: LNS
    premises: tuple[LNS, ...]
    active: tuple[int, ...]
    principal: Formula | None = None

    @property
    def end_active(self) -> bool:
        last = self.conclusion.n - 1
        return all(k >= last - 1 for k in self.active) and (
            self.rule not in PROP_RULES + STRUCTURAL_RULES or self.active == (last,)
        )


LnsNode = Node


def local_positions(g: LNS, mode: str) -> list[int]:
    """Components where propositional, closing, structural and t rules may act."""
    last = g.n - 1
    if mode == FREE:
        return [k for k in range(g.n) if k < last or not g.partial]
    return [] if g.partial else [last]


def _boxes(items: Iterable[Formula]) -> list[Box]:
    return sorted({f for f in items if isinstance(f, Box)})


def _unbox(s: Sequent, f: Box) -> Sequent:
    return Sequent(ms_remove(s.left, f) + (f.body,), s.right)


def _sub_multisets(items: tuple[Formula, ...]) -> Iterator[tuple[Formula, ...]]:
    counts = sorted(Counter(items).items())
    for choice in product(*(range(c + 1) for _, c in counts)):
        yield tuple(f for (f, _), k in zip(counts, choice) for _ in range(k))


def _minus(items: tuple[Formula, ...], sub: tuple[Formula, ...]) -> tuple[Formula, ...]:
    out = items
    for f in sub:
        out = ms_remove(out, f)
    return out


def applicable(reg: LnsRegistry, g: LNS, only: str | None = None) -> list[LnsStep]:
    """Every legal instance with conclusion ``g`` in the registry's mode,
    optionally restricted to one rule name."""
    out: list[LnsStep] = []
    names = set(reg.names)

    def want(rule: str) -> bool:
        return rule in names and (only is None or only == rule)

    def add(rule: str, prems: Iterable[LNS], active: tuple[int, ...], principal: Formula | None = None) -> None:
        out.append(LnsStep(rule, g, tuple(prems), active, principal))

    mode = reg.mode
    for k in local_positions(g, mode):
        comp = g.comps[k]
        for rule in CLOSING_RULES:
            if want(rule) and is_closing_instance(rule, comp):
                add(rule, (), (k,))
        if only is None or only in PROP_RULES:
            for step in prop_steps(comp):
                if want(step.rule):
                    add(step.rule, (g.put(k, p) for p in step.premises), (k,), step.principal)
        if reg.structural and (only is None or only in STRUCTURAL_RULES):
            for rule in STRUCTURAL_RULES:
                if want(rule):
                    for f, prem in structural_premises(rule, comp):
                        add(rule, (g.put(k, prem),), (k,), f)

    match reg.spec:
        case SimplyDependent():
            _sd_steps(reg, g, want, add)
        case ClassicalCube():
            _cube_steps(reg, g, want, add)
        case Monotone():
            _monotone_steps(reg, g, want, add)
    return out


def _sd_steps(reg, g, want, add) -> None:
    spec: SimplyDependent = reg.spec
    d, ups = spec.description, spec.upsets
    mode = reg.mode
    last = g.n - 1
    for k in local_positions(g, mode):
        for f in _boxes(g.comps[k].left):
            rule = sd_name(spec, "t", f.index)
            if want(rule):
                add(rule, (g.put(k, _unbox(g.comps[k], f)),), (k,), f)

    # rules acting across a joint
    if mode == FREE:
        joints = [k for k, j in enumerate(g.joints) if j.kind == PLAIN]
    elif mode == END_ACTIVE:
        joints = [last - 1] if g.joints and g.joints[-1].kind == PLAIN else []
    else:
        joints = [last - 1] if g.joints and g.joints[-1].kind == BLOCK else []
    for k in joints:
        j = g.joints[k].index
        if j not in ups:
            continue
        lo, hi = g.comps[k], g.comps[k + 1]
        for f in _boxes(lo.left):
            if f.index not in ups[j].up:
                continue
            rest = Sequent(ms_remove(lo.left, f), lo.right)
            rule = sd_name(spec, "box_L", f.index, j)
            if want(rule):
                add(rule, (g.put_pair(k, rest, hi.add(left=[f.body])),), (k, k + 1), f)
            rule = sd_name(spec, "4", f.index, j)
            if f.index in ups[j].up4 and want(rule):
                add(rule, (g.put_pair(k, rest, hi.add(left=[f])),), (k, k + 1), f)

    if mode == BLOCK_MODE and g.joints and g.joints[-1].kind == BLOCK and want(CLOSE):
        add(CLOSE, (g.set_last_joint(Joint(PLAIN, g.joints[-1].index)),), (last - 1, last))

    if g.partial:
        return
    new_kind = BLOCK if mode == BLOCK_MODE else PLAIN
    cur = g.last
    for f in _boxes(cur.right):
        rule = sd_name(spec, "box_R", f.index)
        if f.index in d.indices and want(rule):
            rest = Sequent(cur.left, ms_remove(cur.right, f))
            add(rule, (g.open_after(rest, Joint(new_kind, f.index), Sequent((), (f.body,))),), (last,), f)
    for f in _boxes(cur.left):
        for j in sorted(d.indices):
            rule = sd_name(spec, "d", f.index, j)
            if f.index in ups[j].up and d.has(j, D) and want(rule):
                rest = Sequent(ms_remove(cur.left, f), cur.right)
                add(rule, (g.open_after(rest, Joint(new_kind, j), Sequent((f.body,), ())),), (last,), f)


def _cube_steps(reg, g, want, add) -> None:
    ax = reg.spec.axioms
    last = g.n - 1
    cur = g.last
    if not g.partial:
        for f in _boxes(cur.right):
            if f.index != 0:
                continue
            rest = Sequent(cur.left, ms_remove(cur.right, f))
            b = f.body
            if want(BOX_R_E):
                add(BOX_R_E, (g.open_after(rest, Joint(BIN), Sequent((), (b,)), Sequent((b,), ())),), (last,), f)
            if want(N):
                add(N, (g.open_after(rest, Joint(PLAIN), Sequent((), (b,))),), (last,), f)
        return
    if g.joints[-1].kind != BIN:
        return
    prev, side = g.comps[-2], g.side
    assert side is not None
    base = LNS(g.comps[:-1], g.joints[:-1])
    if want(M):
        add(M, (replace(g, side=side.add(left=[BOT])),), (last,))
    for f in _boxes(prev.left):
        if f.index != 0:
            continue
        rest = Sequent(ms_remove(prev.left, f), prev.right)
        a = f.body
        back = base.open_after(rest, Joint(PLAIN), side.add(right=[a]))
        if want(BOX_L_E):
            main = base.open_after(rest, Joint(PLAIN), cur.add(left=[a]))
            add(BOX_L_E, (main, back), (last - 1, last), f)
        if want(C):
            main = base.open_after(rest, Joint(BIN), cur.add(left=[a]), side)
            add(C, (main, back), (last - 1, last), f)


def _monotone_steps(reg, g, want, add) -> None:
    ax = reg.spec.axioms
    inter = uses_intermediate(reg)
    finished = Joint(INTER) if inter else Joint(PLAIN)
    last = g.n - 1
    cur = g.last
    kind = g.joints[-1].kind if g.joints else None

    if not g.partial:
        for f in _boxes(cur.right):
            if f.index == 0 and want(BOX_R_M):
                rest = Sequent(cur.left, ms_remove(cur.right, f))
                add(BOX_R_M, (g.open_after(rest, Joint(MPART), Sequent((), (f.body,))),), (last,), f)
        if want(P):
            add(P, (g.open_after(cur, Joint(MPART), Sequent()),), (last,))
        if want(D):
            for f in _boxes(cur.left):
                if f.index == 0:
                    rest = Sequent(ms_remove(cur.left, f), cur.right)
                    add(D, (g.open_after(rest, Joint(MPART), Sequent((f.body,), ())),), (last,), f)
        if want(T):
            for sigma in _sub_multisets(cur.left):
                for pi in _sub_multisets(cur.right):
                    kept = Sequent(_minus(cur.left, sigma), _minus(cur.right, pi))
                    add(T, (g.open_after(kept, Joint(MPART), Sequent(sigma, pi)),), (last,))
        if want(C) and kind == PLAIN and not inter:
            add(C, (g.set_last_joint(Joint(MPART)),), (last - 1, last))
        return

    if kind == MPART:
        prev = g.comps[-2]
        for f in _boxes(prev.left):
            if f.index != 0:
                continue
            rest = Sequent(ms_remove(prev.left, f), prev.right)
            if want(BOX_L_M):
                add(BOX_L_M, (g.set_last_joint(finished).put_pair(last - 1, rest, cur.add(left=[f.body])),),
                    (last - 1, last), f)
            if want(FOUR):
                add(FOUR, (g.set_last_joint(finished).put_pair(last - 1, rest, cur.add(left=[f])),),
                    (last - 1, last), f)
        if want(FIVE):
            for f in _boxes(prev.right):
                if f.index == 0:
                    rest = Sequent(prev.left, ms_remove(prev.right, f))
                    add(FIVE, (g.set_last_joint(finished).put_pair(last - 1, rest, cur.add(right=[f])),),
                        (last - 1, last), f)
        if want(N):
            add(N, (g.set_last_joint(finished),), (last - 1, last))
    elif kind == INTER and inter:
        if want(C):
            add(C, (g.set_last_joint(Joint(MPART)),), (last - 1, last))
        if want(CLOSE):
            add(CLOSE, (g.set_last_joint(Joint(PLAIN)),), (last - 1, last))


# interpretation

def interpret(g: LNS) -> Formula:
    """The standard formula interpretation; only defined for plain joints."""
    if any(j.kind != PLAIN for j in g.joints):
        raise PartialMarkerUninterpretable(
            "no formula interpretation exists for partial nesting markers"
        )

    def go(k: int) -> Formula:
        comp = g.comps[k]
        if k == g.n - 1:
            return Imp(conj(comp.left), disj(comp.right))
        return Imp(conj(comp.left), Or(disj(comp.right), Box(g.joints[k].index, go(k + 1))))

    return go(0)


# checking

def check_lns_step(reg: LnsRegistry, rule: str, concl: LNS, prems: tuple[LNS, ...]) -> bool:
    return any(step.premises == prems for step in applicable(reg, concl, only=rule))


def check_lns_derivation(d: Node, spec: LogicSpec, mode: str = END_ACTIVE,
                         structural: bool | None = None) -> CheckReport:
    reg = lns_rules_for(spec, mode, structural)
    for path, node in d.walk_paths():
        prems = tuple(p.conclusion for p in node.premises)
        if not check_lns_step(reg, node.rule, node.conclusion, prems):
            return CheckReport(False, path, f"{node.rule} is not a legal {mode} step below {node.conclusion}")
    return CheckReport(True)


def is_local_step(node: Node) -> bool:
    """True when every premise keeps the joints and differs from the
    conclusion in at most one component."""
    g: LNS = node.conclusion
    for p in node.premises:
        h: LNS = p.conclusion
        if h.joints != g.joints or h.side != g.side or h.n != g.n:
            return False
        if sum(a != b for a, b in zip(g.comps, h.comps)) > 1:
            return False
    return True


def creates_component(node: Node) -> bool:
    return any(p.conclusion.n > node.conclusion.n for p in node.premises)


def is_block_form(d: Node) -> bool:
    """Whenever a modal rule sits directly above a propositional rule, it
    creates a new component.  Rules confined to one component (such as
    t) do not count as modal here."""
    for node in d.walk():
        if node.rule not in PROP_RULES:
            continue
        for child in node.premises:
            if not child.premises or child.rule in STRUCTURAL_RULES + PROP_RULES:
                continue
            if not is_local_step(child) and not creates_component(child):
                return False
    return True
