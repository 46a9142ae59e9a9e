"""Backward proof search shared by the nested, labelled and bipole provers.

The search only inspects the last two components of a structure (the
"view"), so the same strategy drives any calculus that can present its
states that way.  A provider turns abstract moves into premises.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Hashable, Protocol, Sequence

from .budget import Exhausted, NodeCapReached, Proved, ProofResult, SearchBudget, SearchStats
from .formula import BOT, Box, Formula
from .lns import (
    BIN, BLOCK, BLOCK_MODE, BOX_L_E, BOX_L_M, BOX_R_E, BOX_R_M, CLOSE, END_ACTIVE, FREE,
    INTER, LNS, MODES, MPART, PLAIN, Joint, LnsRegistry,
    applicable, check_lns_derivation, local_positions, lns_rules_for, sd_name,
)
from .logic import C, D, FIVE, FOUR, M, N, P, T, ClassicalCube, LogicSpec, Monotone, SimplyDependent
from .sequent import (
    STRUCTURAL_RULES, Sequent, closing_rule, decompose, first_prop_step, ms_remove, unpacked,
)
from .tree import Node


@dataclass(frozen=True)
class View:
    prev: Sequent
    cur: Sequent
    joint: Joint
    side: Sequent | None
    nested: bool
    locals: tuple[tuple[int, Sequent], ...]


@dataclass(frozen=True)
class Move:
    rule: str
    principal: Formula | None = None
    pos: int | None = None
    side: str = ""
    arg: Any = None


class Provider(Protocol):
    spec: LogicSpec
    mode: str
    structural: bool

    def view(self, state: Any) -> View: ...

    def apply(self, state: Any, move: Move) -> tuple[Any, ...] | None: ...

    def key(self, state: Any) -> Hashable: ...


def _boxes(items: Sequence[Formula]) -> list[Box]:
    return sorted({f for f in items if isinstance(f, Box)})


class Planner:
    """Chooses the next moves for a state given its view.  Returns
    ("det", [move]) for a step that never needs backtracking, ("branch",
    moves) for a choice point, or None when nothing applies."""

    def __init__(self, spec: LogicSpec, mode: str, budget: SearchBudget, structural: bool):
        self.spec = spec
        self.mode = mode
        self.cap = budget.contraction_cap
        self.structural = structural
        self.block = mode == BLOCK_MODE
        self.ups = spec.upsets if isinstance(spec, SimplyDependent) else {}

    def plan(self, v: View) -> tuple[str, list[Move]] | None:
        match self.spec:
            case SimplyDependent():
                return self._sd(v)
            case ClassicalCube():
                return self._cube(v)
            case Monotone():
                return self._monotone(v)
        return None

    # shared

    def _saturate(self, v: View) -> Move | None:
        if not self.structural:
            return None
        cur = v.cur
        counts = Counter(cur.left)
        spec = self.spec
        for f in _boxes(cur.left):
            if isinstance(spec, SimplyDependent):
                has_t = spec.description.has(f.index, T)
                has_4 = spec.description.has(f.index, FOUR)
                t_move = Move(sd_name(spec, "t", f.index), f)
            else:
                ax = spec.axioms  # type: ignore[attr-defined]
                has_t = T in ax
                has_4 = FOUR in ax or (D in ax and C not in ax)
                t_move = Move(T, f)
            if has_t and not unpacked(f.body, cur):
                return Move("ConL", f, side="L") if counts[f] < self.cap else t_move
            if has_4 and counts[f] < min(self.cap, 2):
                return Move("ConL", f, side="L")
        if isinstance(spec, Monotone) and FIVE in spec.axioms:
            # one copy is opened, the other stays behind to be fed by 5
            right = Counter(cur.right)
            for f in _boxes(cur.right):
                if right[f] < min(self.cap, 2):
                    return Move("ConR", f, side="R")
        return None

    # simply dependent

    def _sd_feed(self, v: View) -> Move | None:
        spec = self.spec
        assert isinstance(spec, SimplyDependent)
        j = v.joint.index
        ups = self.ups
        if j not in ups:
            return None
        counts = Counter(v.prev.left)
        for f in _boxes(v.prev.left):
            if f.index not in ups[j].up:
                continue
            if f.index in ups[j].up4 and (counts[f] >= 2 or f.body in v.cur.left):
                return Move(sd_name(spec, "4", f.index, j), f)
            return Move(sd_name(spec, "box_L", f.index, j), f)
        return None

    def _sd(self, v: View) -> tuple[str, list[Move]] | None:
        spec = self.spec
        assert isinstance(spec, SimplyDependent)
        if v.joint.kind == BLOCK:
            feed = self._sd_feed(v)
            return ("det", [feed or Move(CLOSE)])
        if not self.block and v.nested:
            feed = self._sd_feed(v)
            if feed:
                return ("det", [feed])
        sat = self._saturate(v)
        if sat:
            return ("det", [sat])
        d, ups = spec.description, self.ups
        moves = [Move(sd_name(spec, "box_R", f.index), f) for f in _boxes(v.cur.right) if f.index in d.indices]
        for j in sorted(d.indices):
            if d.has(j, D):
                moves += [Move(sd_name(spec, "d", f.index, j), f, arg=j)
                          for f in _boxes(v.cur.left) if f.index in ups[j].up]
        return ("branch", moves)

    # classical cube

    def _cube(self, v: View) -> tuple[str, list[Move]] | None:
        ax = self.spec.axioms  # type: ignore[attr-defined]
        if v.joint.kind == BIN:
            assert v.side is not None
            if M in ax and BOT not in v.side.left:
                return ("det", [Move("M")])
            top = max(v.cur.left) if v.cur.left else None
            moves = []
            for f in _boxes(v.prev.left):
                if f.index != 0 or (top is not None and f.body < top):
                    continue
                if C in ax:
                    moves.append(Move(C, f))
                moves.append(Move(BOX_L_E, f))
            return ("branch", moves)
        moves = []
        for f in _boxes(v.cur.right):
            if f.index == 0:
                moves.append(Move(BOX_R_E, f))
                if N in ax:
                    moves.append(Move(N, f))
        return ("branch", moves)

    # monotone

    def _feedable(self, s: Sequent) -> bool:
        ax = self.spec.axioms  # type: ignore[attr-defined]
        return bool(_boxes(s.left)) or (FIVE in ax and bool(_boxes(s.right)))

    def _mc_feed(self, v: View) -> Move | None:
        ax = self.spec.axioms  # type: ignore[attr-defined]
        counts = Counter(v.prev.left)
        for f in _boxes(v.prev.left):
            if FOUR in ax and (counts[f] >= 2 or f.body in v.cur.left):
                return Move(FOUR, f)
            return Move(BOX_L_M, f)
        if FIVE in ax:
            for f in _boxes(v.prev.right):
                return Move(FIVE, f)
        return None

    def _monotone(self, v: View) -> tuple[str, list[Move]] | None:
        ax = self.spec.axioms  # type: ignore[attr-defined]
        kind = v.joint.kind
        with_c = C in ax
        if kind == MPART:
            if with_c:
                feed = self._mc_feed(v)
                if feed:
                    return ("det", [feed])
                return ("det", [Move(N)]) if N in ax else None
            moves = [Move(BOX_L_M, f) for f in _boxes(v.prev.left)]
            if v.cur == Sequent():
                # opened by P: anything but a box from the left is useless
                return ("branch", moves)
            if FOUR in ax:
                moves += [Move(FOUR, f) for f in _boxes(v.prev.left)]
            if FIVE in ax:
                moves += [Move(FIVE, f) for f in _boxes(v.prev.right)]
            if N in ax:
                moves.append(Move(N))
            return ("branch", moves)
        if kind == INTER:
            return ("det", [Move(C) if self._feedable(v.prev) else Move(CLOSE)])
        if with_c and not self.block and v.nested and self._feedable(v.prev):
            return ("det", [Move(C)])
        sat = self._saturate(v)
        if sat:
            return ("det", [sat])
        moves = [Move(BOX_R_M, f) for f in _boxes(v.cur.right)]
        lboxes = _boxes(v.cur.left)
        if P in ax and (self._feedable(v.cur) if with_c else lboxes):
            moves.append(Move(P))
        if D in ax and lboxes and not (with_c and P in ax):
            moves += [Move(D, f) for f in (lboxes[:1] if with_c else lboxes)]
        return ("branch", moves)





@dataclass
class Search:
    provider: Provider
    budget: SearchBudget
    stats: SearchStats = field(default_factory=SearchStats)
    failed: dict[Hashable, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        p = self.provider
        self.planner = Planner(p.spec, p.mode, self.budget, p.structural)

    def prove(self, state: Any, depth: int, level: int = 1) -> Node | None:
        self.stats.nodes += 1
        self.stats.max_depth = max(self.stats.max_depth, level)
        if self.stats.nodes > self.budget.node_cap:
            raise NodeCapReached
        v = self.provider.view(state)
        for pos, comp in v.locals:
            rule = closing_rule(comp)
            if rule:
                prems = self.provider.apply(state, Move(rule, pos=pos))
                if prems == ():
                    return Node(rule, state)
        if depth <= 0:
            return None
        key = self.provider.key(state)
        if self.failed.get(key, -1) >= depth:
            return None
        out = self._expand(state, v, depth, level)
        if out is None:
            self.failed[key] = max(depth, self.failed.get(key, -1))
        return out

    def _expand(self, state: Any, v: View, depth: int, level: int) -> Node | None:
        for pos, comp in v.locals:
            step = first_prop_step(comp)
            if step is not None:
                return self._apply(state, Move(step.rule, step.principal, pos, step.side), depth, level)
        plan = self.planner.plan(v)
        if plan is None:
            return None
        kind, moves = plan
        for move in moves:
            out = self._apply(state, move, depth, level)
            if out is not None or kind == "det":
                return out
        return None

    def _apply(self, state: Any, move: Move, depth: int, level: int) -> Node | None:
        prems = self.provider.apply(state, move)
        if prems is None:
            return None
        cost = 0 if move.rule in STRUCTURAL_RULES else 1
        subs = []
        for p in prems:
            sub = self.prove(p, depth - cost, level + 1)
            if sub is None:
                return None
            subs.append(sub)
        return Node(move.rule, state, tuple(subs))


def run_search(provider: Provider, goal: Any, budget: SearchBudget) -> ProofResult:
    search = Search(provider, budget)
    try:
        node = search.prove(goal, budget.depth)
    except NodeCapReached:
        search.stats.node_cap_hit = True
        return Exhausted(search.stats)
    if node is None:
        return Exhausted(search.stats)
    return Proved(node, search.stats)


# linear nested sequents

class LnsProvider:
    def __init__(self, spec: LogicSpec, mode: str, structural: bool | None = None):
        self.spec = spec
        self.mode = mode
        self.registry: LnsRegistry = lns_rules_for(spec, mode, structural)
        self.structural = self.registry.structural

    def view(self, g: LNS) -> View:
        nested = g.n > 1
        return View(
            prev=g.comps[-2] if nested else Sequent(),
            cur=g.last,
            joint=g.joints[-1] if nested else Joint(PLAIN, 0),
            side=g.side,
            nested=nested,
            locals=tuple((k, g.comps[k]) for k in local_positions(g, self.mode)),
        )

    def key(self, g: LNS) -> Hashable:
        # earlier components are fully decomposed and never closing once a
        # later one exists, so only the last two matter
        return (g.comps[-2] if g.n > 1 else None, g.last, g.last_joint, g.side)

    def apply(self, g: LNS, move: Move) -> tuple[LNS, ...] | None:
        rule = move.rule
        pos = g.n - 1 if move.pos is None else move.pos
        comp = g.comps[pos]
        if closing_rule(comp) == rule:
            return ()
        if move.side and move.principal is not None and rule not in STRUCTURAL_RULES:
            step = decompose(comp, move.principal, move.side)
            if step is None or step.rule != rule:
                return None
            return tuple(g.put(pos, p) for p in step.premises)
        if rule == "ConL":
            return (g.put(pos, comp.add(left=[move.principal])),)
        if rule == "ConR":
            return (g.put(pos, comp.add(right=[move.principal])),)
        if rule == T and isinstance(self.spec, Monotone):
            f = move.principal
            rest = Sequent(ms_remove(comp.left, f), comp.right)
            return (g.open_after(Sequent((f,), ()), Joint(MPART), rest),)
        for step in applicable(self.registry, g, only=rule):
            if move.principal is not None and step.principal != move.principal:
                continue
            if move.arg is not None and step.premises[0].joints[-1].index != move.arg:
                continue
            return step.premises
        return None


def lns_prove(goal: LNS | Sequent, spec: LogicSpec, strategy: str = BLOCK_MODE,
              budget: SearchBudget | None = None, structural: bool | None = None) -> ProofResult:
    """Bounded backward search in the given mode.  A Proved result is
    re-checked against the mode's rule registry before it is returned."""
    if strategy not in MODES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {', '.join(MODES)}")
    budget = budget or SearchBudget()
    g = goal if isinstance(goal, LNS) else LNS.single(goal)
    if strategy == BLOCK_MODE and g.partial:
        raise ValueError("block search needs a goal without partial markers")
    provider = LnsProvider(spec, strategy, structural)
    result = run_search(provider, g, budget)
    if result.proved:
        report = check_lns_derivation(result.derivation, spec, strategy, provider.structural)
        if not report:
            raise AssertionError(f"search produced an illegal derivation: {report.message}")
    return result
