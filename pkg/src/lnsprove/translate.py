"""Translations between sequent derivations and block-form derivations of
linear nested sequents."""

from __future__ import annotations

from collections import Counter
from typing import Callable

from .formula import Box, Formula
from .lns import (
    BLOCK_MODE, BOX_L_E, BOX_L_M, BOX_R_E, BOX_R_M, CLOSE, END_ACTIVE, LNS, MPART, PLAIN,
    LnsRegistry, LnsStep, applicable, check_lns_derivation, creates_component, is_block_form,
    is_local_step, lns_rules_for, sd_name,
)
from .logic import C, D, FIVE, FOUR, M, N, P, ClassicalCube, LogicSpec, Monotone, SimplyDependent
from .oracle import (
    UnsupportedRule, _assignments, check_seq_step, seq_rules_for, split_indexed,
    structural_chain, wrap_chain,
)
from .sequent import CLOSING_RULES, PROP_RULES, STRUCTURAL_RULES, Sequent, ms_minus, ms_remove
from .tree import Node


class NotBlockForm(ValueError):
    pass


class NotEndActive(ValueError):
    pass


class ExtractionError(ValueError):
    pass


LOCAL_SEQ_RULES = CLOSING_RULES + PROP_RULES + STRUCTURAL_RULES


# sequent -> block form

class _Trail:
    """Accumulates single-premise steps (with optional finished side
    branches) above a starting structure."""

    def __init__(self, reg: LnsRegistry, g: LNS):
        self.reg = reg
        self.g = g
        self.steps: list[tuple[str, LNS, tuple[Node, ...]]] = []

    def apply(self, rule: str, principal: Formula | None = None,
              pick: Callable[[LnsStep], bool] | None = None) -> LnsStep:
        for step in applicable(self.reg, self.g, only=rule):
            if principal is not None and step.principal != principal:
                continue
            if pick is not None and not pick(step):
                continue
            return step
        raise UnsupportedRule(f"cannot apply {rule} to {self.g}")

    def go(self, rule: str, principal: Formula | None = None,
           pick: Callable[[LnsStep], bool] | None = None,
           sides: Callable[[tuple[LNS, ...]], tuple[Node, ...]] | None = None) -> LNS:
        step = self.apply(rule, principal, pick)
        done = sides(step.premises[1:]) if sides else ()
        self.steps.append((rule, self.g, done))
        self.g = step.premises[0]
        return self.g

    def close(self, top: Node) -> Node:
        node = top
        for rule, concl, done in reversed(self.steps):
            node = Node(rule, concl, (node,) + done)
        return node


def simulate_sequent_derivation(d: Node, spec: LogicSpec, structural: bool = False) -> Node:
    """Turn a sequent derivation into a block-form derivation of the
    corresponding single-component structure.  For the classical cube,
    contraction and weakening are only accepted with ``structural``."""
    if isinstance(spec, ClassicalCube) and not structural:
        for node in d.walk():
            if node.rule in STRUCTURAL_RULES:
                raise UnsupportedRule(
                    f"{node.rule} has no counterpart in the cube calculus without structural rules")
    reg = lns_rules_for(spec, BLOCK_MODE, structural or None)
    return _Simulator(spec, reg).run(d, LNS.single(d.conclusion))


class _Simulator:
    def __init__(self, spec: LogicSpec, reg: LnsRegistry):
        self.spec = spec
        self.reg = reg

    def run(self, node: Node, g: LNS) -> Node:
        rule = node.rule
        if rule in LOCAL_SEQ_RULES or split_indexed(rule)[0] == "t":
            return self._local(node, g)
        match self.spec:
            case SimplyDependent():
                return self._sd(node, g)
            case ClassicalCube():
                return self._cube(node, g)
            case Monotone():
                return self._monotone(node, g)
        raise UnsupportedRule(rule)

    def _premise_node(self, node: Node, k: int, g: LNS) -> Node:
        return self.run(node.premises[k], g)

    def _local(self, node: Node, g: LNS) -> Node:
        last = g.n - 1
        if node.rule in LOCAL_SEQ_RULES:
            prems = tuple(g.put(last, p.conclusion) for p in node.premises)
            return Node(node.rule, g, tuple(self.run(p, h) for p, h in zip(node.premises, prems)))
        # t may unbox several boxes at once; replay them one by one
        concl, prem = node.conclusion, node.premises[0].conclusion
        trail = _Trail(self.reg, g)
        left = list(concl.left)
        target = Counter(prem.left)
        for f in sorted(set(concl.left)):
            while isinstance(f, Box) and Counter(left)[f] > target[f]:
                trail.go(sd_name(self.spec, "t", f.index), f)
                left.remove(f)
                left.append(f.body)
        if trail.g.last != prem:
            raise UnsupportedRule(f"cannot replay {node.rule} below {prem}")
        return trail.close(self.run(node.premises[0], trail.g))

    # simply dependent

    def _sd(self, node: Node, g: LNS) -> Node:
        spec = self.spec
        assert isinstance(spec, SimplyDependent)
        base, i = split_indexed(node.rule)
        i = 0 if i is None else i
        up = spec.upsets[i]
        concl, prem = node.conclusion, node.premises[0].conclusion
        trail = _Trail(self.reg, g)

        def rel(x: Formula, y: Formula) -> str | None:
            if not isinstance(y, Box):
                return None
            if x == y and y.index in up.up4:
                return "kept"
            if y.body == x and y.index in up.up:
                return "unboxed"
            return None

        feeds = self._sd_assignment(prem.left, concl.left, rel)
        weaken = None
        if base == "k":
            trail.go(sd_name(spec, "box_R", i), Box(i, prem.right[0]))
        else:
            opener = next((k for k, (_, y, kind) in enumerate(feeds) if kind == "unboxed"), None)
            if opener is None:
                if not feeds:
                    raise UnsupportedRule("d with an empty premise")
                _, y, _ = feeds[0]
                trail.go("ConL", y)
                trail.go(sd_name(spec, "d", y.index, i), y, pick=lambda s: s.premises[0].joints[-1].index == i)
                weaken = y.body
            else:
                _, y, _ = feeds.pop(opener)
                trail.go(sd_name(spec, "d", y.index, i), y, pick=lambda s: s.premises[0].joints[-1].index == i)
        for _, y, kind in feeds:
            trail.go(sd_name(spec, "4" if kind == "kept" else "box_L", y.index, i), y)
        trail.go(CLOSE)
        if weaken is not None:
            trail.go("WL", weaken, pick=lambda s: s.premises[0].last == prem)
        if trail.g.last != prem:
            raise UnsupportedRule(f"simulation of {node.rule} reached {trail.g.last}, not {prem}")
        return trail.close(self.run(node.premises[0], trail.g))

    @staticmethod
    def _sd_assignment(prem: tuple[Formula, ...], concl: tuple[Formula, ...],
                       rel: Callable[[Formula, Formula], str | None]) -> list[tuple[Formula, Box, str]]:
        """Pair each premise formula with the conclusion box it comes from."""
        used = [False] * len(concl)
        out: list[tuple[Formula, Box, str]] = []

        def go(k: int) -> bool:
            if k == len(prem):
                return True
            for j, y in enumerate(concl):
                if used[j]:
                    continue
                kind = rel(prem[k], y)
                if kind is None:
                    continue
                used[j] = True
                out.append((prem[k], y, kind))  # type: ignore[arg-type]
                if go(k + 1):
                    return True
                out.pop()
                used[j] = False
            return False

        if not go(0):
            raise UnsupportedRule("premise does not match the conclusion's boxes")
        return out

    # classical cube

    def _cube(self, node: Node, g: LNS) -> Node:
        rule = node.rule
        prem = node.premises[0].conclusion
        b = prem.right[0]
        trail = _Trail(self.reg, g)
        if rule == "N" or (rule == "Mn" and not prem.left):
            trail.go(N, Box(0, b))
            return trail.close(self.run(node.premises[0], trail.g))
        backs = list(node.premises[1:])
        trail.go(BOX_R_E, Box(0, b))
        if rule in ("M", "Mn"):
            trail.go(M)

        def side_for(a: Formula) -> Callable[[tuple[LNS, ...]], tuple[Node, ...]]:
            def build(others: tuple[LNS, ...]) -> tuple[Node, ...]:
                (h,) = others
                if rule in ("M", "Mn"):
                    return (Node("botL", h),)
                for k, child in enumerate(backs):
                    if child.conclusion == h.last:
                        return (self.run(backs.pop(k), h),)
                raise UnsupportedRule(f"no side premise {h.last} for {rule}")
            return build

        items = list(prem.left)
        for a in items[:-1]:
            trail.go(C, Box(0, a), sides=side_for(a))
        trail.go(BOX_L_E, Box(0, items[-1]), sides=side_for(items[-1]))
        return trail.close(self.run(node.premises[0], trail.g))

    # monotone

    def _monotone(self, node: Node, g: LNS) -> Node:
        spec = self.spec
        assert isinstance(spec, Monotone)
        ax = spec.axioms
        rule = node.rule
        concl, prem = node.conclusion, node.premises[0].conclusion
        trail = _Trail(self.reg, g)
        with_c = C in ax

        def reopen() -> None:
            trail.go(C)

        def finish_feeds(feeds: list[tuple[str, Formula]]) -> None:
            for k, (r, f) in enumerate(feeds):
                if k and with_c:
                    reopen()
                trail.go(r, f)

        if rule == "T":
            f = next((f for f in sorted(set(concl.left)) if isinstance(f, Box)
                      and Counter(ms_remove(concl.left, f) + (f.body,)) == Counter(prem.left)), None)
            if f is None:
                raise UnsupportedRule(f"T does not derive {concl} from {prem}")
            rest = Sequent(ms_remove(concl.left, f), concl.right)
            trail.go("T", pick=lambda s: s.premises[0].comps[-2] == Sequent((f,), ()) and s.premises[0].last == rest)
            trail.go(BOX_L_M, f)
        elif rule in ("M", "N", "4", "5") and concl.right:
            rb = self._right_target(concl, prem)
            trail.go(BOX_R_M, rb)
            if rule == "M":
                trail.go(BOX_L_M, concl.left[0])
            elif rule == "4":
                trail.go(FOUR, concl.left[0])
            elif rule == "5":
                other = ms_remove(concl.right, rb)[0]
                trail.go(FIVE, other)
            else:
                trail.go(N)
        elif rule in ("P", "D", "D4", "D5"):
            first = self._opener_box(concl, prem)
            if rule == "P":
                trail.go(P)
                trail.go(BOX_L_M, first)
            else:
                trail.go(D, first)
                rest_left = ms_remove(concl.left, first)
                if rule == "D":
                    trail.go(BOX_L_M, rest_left[0])
                elif rule == "D4":
                    trail.go(FOUR, rest_left[0])
                else:
                    trail.go(FIVE, concl.right[0])
        elif rule in ("C", "C4", "K4", "K45"):
            rb = self._right_target(concl, prem)
            trail.go(BOX_R_M, rb)
            feeds = self._feeds(concl.left, prem.left)
            others = ms_remove(concl.right, rb) if rule == "K45" else ()
            feeds += [(FIVE, f) for f in others]
            if feeds:
                finish_feeds(feeds)
            else:
                trail.go(N)
            if self.reg.mode == BLOCK_MODE and with_c:
                trail.go(CLOSE)
        elif rule in ("CD", "CD4", "KD45"):
            feeds = self._feeds(concl.left, prem.left)
            feeds += [(FIVE, f) for f in concl.right]
            weaken = None
            if P in ax:
                trail.go(P)
            else:
                k = next((k for k, (r, _) in enumerate(feeds) if r == BOX_L_M), None)
                if k is None:
                    f = feeds[0][1]
                    trail.go("ConL", f)
                    trail.go(D, f)
                    weaken = f.body  # type: ignore[attr-defined]
                else:
                    trail.go(D, feeds.pop(k)[1])
                    if not feeds:
                        raise UnsupportedRule(f"{rule} with one box needs P or a second copy")
            if weaken is None and not feeds:
                raise UnsupportedRule(f"{rule} with nothing to feed")
            finish_feeds(feeds)
            if self.reg.mode == BLOCK_MODE and with_c:
                trail.go(CLOSE)
            if weaken is not None:
                trail.go("WL", weaken, pick=lambda s: s.premises[0].last == prem)
        else:
            raise UnsupportedRule(f"no simulation for {rule}")
        if trail.g.last != prem:
            raise UnsupportedRule(f"simulation of {rule} reached {trail.g.last}, not {prem}")
        return trail.close(self.run(node.premises[0], trail.g))

    @staticmethod
    def _right_target(concl: Sequent, prem: Sequent) -> Formula:
        """The right box whose body ends up in the premise; the remaining
        right boxes, if any, are carried over unchanged."""
        for f in sorted(set(concl.right)):
            if isinstance(f, Box) and f.body in prem.right:
                rest = ms_remove(concl.right, f)
                if len(concl.right) == 1 or Counter(rest + (f.body,)) == Counter(prem.right):
                    return f
        raise UnsupportedRule(f"no boxed principal for {prem}")

    @staticmethod
    def _opener_box(concl: Sequent, prem: Sequent) -> Formula:
        for f in sorted(set(concl.left)):
            if not isinstance(f, Box) or f.body not in prem.left:
                continue
            rest = ms_remove(concl.left, f)
            other = ms_remove(prem.left, f.body)
            if all(x == y or (isinstance(y, Box) and y.body == x) for x, y in zip(other, rest)):
                return f
        raise UnsupportedRule(f"no box opens {prem}")

    def _feeds(self, concl_left: tuple[Formula, ...], prem_left: tuple[Formula, ...]) -> list[tuple[str, Formula]]:
        """Each conclusion box either moves as it is (4) or loses its box."""

        def rel(x: Formula, y: Formula) -> str | None:
            if x == y and isinstance(y, Box):
                return FOUR
            if isinstance(y, Box) and y.body == x:
                return BOX_L_M
            return None

        pairs = self._sd_assignment(prem_left, concl_left, rel)
        if len(pairs) != len(concl_left):
            raise UnsupportedRule("every box must be used")
        return [(kind, y) for _, y, kind in pairs]


# block form -> sequent

def extract_sequent_derivation(d: Node, spec: LogicSpec, structural: bool | None = None) -> Node:
    """Read a sequent derivation off an end-active block-form derivation
    whose root is a single component."""
    if d.conclusion.n != 1:
        raise ExtractionError("the root must be a single component")
    modes = [m for m in (BLOCK_MODE, END_ACTIVE) if check_lns_derivation(d, spec, m, structural)]
    if not modes:
        raise NotEndActive("the derivation is not a legal end-active derivation")
    if not is_block_form(d):
        raise NotBlockForm("a modal step sits above a propositional step without opening a component")
    return _Extractor(spec).run(d)


class _Extractor:
    def __init__(self, spec: LogicSpec):
        self.spec = spec
        self.registry = seq_rules_for(spec)
        self.modal = self.registry.modal

    def run(self, node: Node) -> Node:
        g: LNS = node.conclusion
        start = g.last
        if not node.premises and node.rule in CLOSING_RULES:
            return Node(node.rule, start)
        if is_local_step(node) and all(_acts_on_last(node, p) for p in node.premises):
            rule = node.rule
            if split_indexed(rule)[0] == "t" or rule in LOCAL_SEQ_RULES:
                name = rule if rule in LOCAL_SEQ_RULES else self._seq_t_name(rule)
                return Node(name, start, tuple(self.run(p) for p in node.premises))
        if not creates_component(node):
            raise NotBlockForm(f"{node.rule} acts on a joint outside a block")
        return self._block(node, g.n, start)

    def _seq_t_name(self, rule: str) -> str:
        return rule if rule in self.registry else "T"

    def _block(self, opener: Node, n0: int, start: Sequent) -> Node:
        exits: list[Node] = []

        def descend(node: Node) -> None:
            for p in node.premises:
                h: LNS = p.conclusion
                if h.n == n0 + 1 and not h.partial and (not p.premises or is_local_step(p) or creates_component(p)):
                    exits.append(p)
                elif h.n == n0 + 1:
                    descend(p)
                else:
                    raise NotBlockForm(f"{p.rule} leaves the block at the wrong length")

        descend(opener)
        main = opener
        while not any(main is e for e in exits):
            main = main.premises[0]
        backs = [e for e in exits if e is not main]
        pen = main.conclusion.comps[-2]
        left = ms_minus(start.left, pen.left)
        right = ms_minus(start.right, pen.right)
        if left is None or right is None:
            raise ExtractionError("the block adds formulas to its source component")
        core = Sequent(left, right)
        options = [(start, [main] + backs), (core, [main] + backs), (start, [main]), (core, [main])]
        for concl, used in options:
            prems = [e.conclusion.last for e in used]
            for rule in self.modal:
                if check_seq_step(rule, concl, prems, self.spec, self.registry):
                    node = Node(rule, concl, tuple(self.run(e) for e in used))
                    if concl == start:
                        return node
                    chain = structural_chain(start, concl)
                    if chain is None:
                        continue
                    return wrap_chain(node, chain)
        raise ExtractionError(f"no sequent rule matches the block opened by {opener.rule} below {start}")


def _acts_on_last(node: Node, prem: Node) -> bool:
    g, h = node.conclusion, prem.conclusion
    return g.comps[:-1] == h.comps[:-1] and g.joints == h.joints
