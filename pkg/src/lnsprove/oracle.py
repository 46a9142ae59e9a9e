"""Ordinary sequent calculi used as the reference oracle: propositional G
plus the modal rules of the simply dependent, classical-cube and monotone
families, with bounded backward search and an independent checker."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterator, Sequence

from .budget import Exhausted, NodeCapReached, Proved, ProofResult, SearchBudget, SearchStats
from .formula import Box, Formula
from .tree import CheckReport, Node
from .logic import (
    C, D, FIVE, FOUR, M, N, P, T,
    ClassicalCube, LogicSpec, Monotone, SimplyDependent,
)
from .sequent import (
    CLOSING_RULES, PROP_RULES, STRUCTURAL_RULES, Multiset, Sequent,
    check_prop, closing_rule, first_prop_step, ms, ms_minus, ms_remove, unpacked,
)


class UnsupportedRule(ValueError):
    pass


SeqNode = Node
SeqDerivation = SeqNode


def indexed(base: str, i: int, spec: LogicSpec) -> str:
    return base if spec.indices == frozenset({0}) else f"{base}_{i}"


def split_indexed(name: str) -> tuple[str, int | None]:
    base, sep, idx = name.rpartition("_")
    if sep and idx.isdigit() and base in ("k", "d", "t"):
        return base, int(idx)
    return name, None


@dataclass(frozen=True)
class SeqRegistry:
    spec: LogicSpec
    modal: tuple[str, ...]
    structural: tuple[str, ...] = STRUCTURAL_RULES

    @property
    def names(self) -> tuple[str, ...]:
        return CLOSING_RULES + PROP_RULES + self.structural + self.modal

    def __contains__(self, rule: str) -> bool:
        return rule in self.names


def seq_rules_for(spec: LogicSpec) -> SeqRegistry:
    match spec:
        case SimplyDependent(description=d):
            names = [indexed("k", i, spec) for i in sorted(d.indices)]
            names += [indexed("d", i, spec) for i in sorted(d.indices) if d.has(i, D)]
            names += [indexed("t", i, spec) for i in sorted(d.indices) if d.has(i, T)]
            return SeqRegistry(spec, tuple(names))
        case ClassicalCube(axioms=ax):
            if M in ax:
                names = ["Mn" if C in ax else "M"]
            else:
                names = ["En" if C in ax else "E"]
            # in MCN the zero-premise-box instance of Mn plays the role of N
            if N in ax and not (M in ax and C in ax):
                names.append("N")
            return SeqRegistry(spec, tuple(names))
        case Monotone(axioms=ax):
            names = ([] if C in ax else ["M"]) + [a for a in (N, P, D, T, FOUR, FIVE) if a in ax]
            if D in ax and FOUR in ax:
                names.append("D4")
            if D in ax and FIVE in ax:
                names.append("D5")
            if C in ax:
                names.append("C")
                if P in ax or D in ax:
                    names.append("CD")
                if FOUR in ax:
                    names.append("C4")
                    if P in ax or D in ax:
                        names.append("CD4")
                    if N in ax:
                        names.append("K4")
                        if FIVE in ax:
                            names.append("K45")
                            if P in ax or D in ax:
                                names.append("KD45")
            return SeqRegistry(spec, tuple(names))
    raise TypeError(f"unknown logic spec {spec!r}")


# checking

def _boxes(items: Multiset, index: int | None = 0) -> list[Formula]:
    return [f for f in items if isinstance(f, Box) and (index is None or f.index == index)]


def _assignments(prem: Sequence[Formula], concl: Sequence[Formula],
                 relate: Callable[[Formula, Formula], str | None]) -> Iterator[list[str]]:
    """Injective maps from premise items to conclusion items; yields the list
    of relation kinds used."""
    used = [False] * len(concl)
    kinds: list[str] = []

    def go(k: int) -> Iterator[list[str]]:
        if k == len(prem):
            yield list(kinds)
            return
        tried = set()
        for j, y in enumerate(concl):
            if used[j] or y in tried:
                continue
            kind = relate(prem[k], y)
            if kind is None:
                continue
            tried.add(y)
            used[j] = True
            kinds.append(kind)
            yield from go(k + 1)
            kinds.pop()
            used[j] = False

    yield from go(0)


def _unboxed(items: Multiset) -> Multiset | None:
    if not all(isinstance(f, Box) and f.index == 0 for f in items):
        return None
    return ms(f.body for f in items)  # type: ignore[attr-defined]


def _check_sd(base: str, i: int, concl: Sequent, prems: Sequence[Sequent], spec: SimplyDependent) -> bool:
    d = spec.description
    up = spec.upsets[i]
    if base == "t":
        if not d.has(i, T) or len(prems) != 1:
            return False
        prem = prems[0]
        if prem.right != concl.right or len(prem.left) != len(concl.left):
            return False

        def rel_t(x: Formula, y: Formula) -> str | None:
            if x == y:
                return "ctx"
            if isinstance(y, Box) and y.index in up.up and y.body == x:
                return "t"
            return None

        return any("t" in ks for ks in _assignments(prem.left, concl.left, rel_t))

    if len(prems) != 1 or (base == "d" and not d.has(i, D)):
        return False
    prem = prems[0]
    if base == "k":
        if len(prem.right) != 1 or Box(i, prem.right[0]) not in concl.right:
            return False
    elif prem.right:
        return False

    def rel_k(x: Formula, y: Formula) -> str | None:
        if not isinstance(y, Box):
            return None
        if x == y and y.index in up.up4:
            return "kept"
        if y.body == x and y.index in up.up:
            return "unboxed"
        return None

    return next(_assignments(prem.left, concl.left, rel_k), None) is not None


def _check_cube(rule: str, concl: Sequent, prems: Sequence[Sequent], spec: ClassicalCube) -> bool:
    rboxes = _boxes(concl.right)
    if rule == "N":
        return len(prems) == 1 and not prems[0].left and len(prems[0].right) == 1 \
            and Box(0, prems[0].right[0]) in rboxes
    if not prems or len(prems[0].right) != 1 or Box(0, prems[0].right[0]) not in rboxes:
        return False
    main = prems[0]
    b = main.right[0]
    n = len(main.left)
    if ms_minus(concl.left, ms(Box(0, a) for a in main.left)) is None:
        return False
    if rule in ("M", "Mn"):
        if len(prems) != 1:
            return False
        if rule == "M":
            return n == 1
        return n >= 1 or (C in spec.axioms and N in spec.axioms)
    if rule in ("E", "En"):
        if n < 1 or (rule == "E" and n != 1) or len(prems) != n + 1:
            return False
        backs = Counter((p.left, p.right) for p in prems[1:])
        wanted = Counter(((b,), (a,)) for a in main.left)
        return backs == wanted
    return False


def _split_boxed(prem_left: Multiset, concl_left: Multiset, min_size: int) -> bool:
    """Is ``concl_left`` = boxed Gamma, boxed Sigma with ``prem_left`` = boxed Gamma, Sigma?"""
    if len(prem_left) != len(concl_left) or len(concl_left) < min_size:
        return False
    if _unboxed(concl_left) is None:
        return False

    def rel(x: Formula, y: Formula) -> str | None:
        if x == y:
            return "kept"
        if isinstance(y, Box) and y.body == x:
            return "unboxed"
        return None

    return next(_assignments(prem_left, concl_left, rel), None) is not None


def _check_monotone(rule: str, concl: Sequent, prems: Sequence[Sequent], spec: Monotone) -> bool:
    if len(prems) != 1:
        return False
    prem = prems[0]
    L, R = concl.left, concl.right
    uL, uR = _unboxed(L), _unboxed(R)
    pl, pr = prem.left, prem.right
    match rule:
        case "T":
            if pr != R or len(pl) != len(L):
                return False
            for f in set(L):
                if isinstance(f, Box) and f.index == 0 and ms(ms_remove(L, f) + (f.body,)) == pl:
                    return True
            return False
        case "M":
            return len(L) == 1 and len(R) == 1 and uL == pl and uR == pr and uL is not None and uR is not None
        case "N":
            return not L and len(R) == 1 and uR == pr and not pl
        case "P":
            return len(L) == 1 and not R and uL == pl and not pr
        case "D":
            return len(L) == 2 and not R and uL == pl and not pr
        case "4":
            return len(L) == 1 and len(R) == 1 and uL is not None and uR is not None and pl == L and pr == uR
        case "5":
            if len(R) != 2 or L or pl or uR is None:
                return False
            a, b = R
            return pr in (ms((a.body, b)), ms((b.body, a)))  # type: ignore[attr-defined]
        case "D4":
            if len(L) != 2 or R or pr or uL is None:
                return False
            a, b = L
            return pl in (ms((a.body, b)), ms((b.body, a)))  # type: ignore[attr-defined]
        case "D5":
            return len(L) == 1 and len(R) == 1 and uL is not None and uR is not None and pl == uL and pr == R
        case "C":
            return len(L) >= 1 and len(R) == 1 and uL == pl and uR == pr and uL is not None
        case "CD":
            return len(L) >= 1 and not R and uL == pl and not pr
        case "C4" | "K4":
            if len(R) != 1 or uR is None or pr != uR:
                return False
            return _split_boxed(pl, L, 1 if rule == "C4" else 0)
        case "CD4":
            return not R and not pr and _split_boxed(pl, L, 1)
        case "K45":
            if uR is None or not R:
                return False
            for f in set(R):
                rest = ms_remove(R, f)
                if pr == ms(rest + (f.body,)):  # type: ignore[attr-defined]
                    return _split_boxed(pl, L, 0)
            return False
        case "KD45":
            return uR is not None and pr == R and _split_boxed(pl, L, 0)
    return False


def check_seq_step(rule: str, concl: Sequent, prems: Sequence[Sequent], spec: LogicSpec,
                   registry: SeqRegistry | None = None) -> bool:
    registry = registry or seq_rules_for(spec)
    if rule not in registry:
        return False
    if rule in CLOSING_RULES or rule in PROP_RULES or rule in STRUCTURAL_RULES:
        return check_prop(rule, concl, prems)
    match spec:
        case SimplyDependent():
            base, i = split_indexed(rule)
            if i is None:
                i = 0
            return _check_sd(base, i, concl, prems, spec)
        case ClassicalCube():
            return _check_cube(rule, concl, prems, spec)
        case Monotone():
            return _check_monotone(rule, concl, prems, spec)
    return False


def check_seq_derivation(d: SeqNode, spec: LogicSpec) -> CheckReport:
    """True iff every node is a legal instance of a registered rule; on
    failure the report names the first bad node by its path from the root."""
    registry = seq_rules_for(spec)
    stack: list[tuple[SeqNode, tuple[int, ...]]] = [(d, ())]
    while stack:
        node, path = stack.pop()
        prems = [p.conclusion for p in node.premises]
        if not check_seq_step(node.rule, node.conclusion, prems, spec, registry):
            return CheckReport(False, path, f"{node.rule} does not derive {node.conclusion}")
        for k, p in enumerate(node.premises):
            stack.append((p, path + (k,)))
    return CheckReport(True)


def structural_chain(s: Sequent, core: Sequent, cap: int | None = None) -> list[tuple[str, Sequent]] | None:
    """Contractions then weakenings leading upwards from ``s`` to ``core``,
    as (rule, conclusion) pairs; None if ``core`` needs more than ``cap``
    copies of some formula or a formula absent from ``s``."""
    steps = []
    cur = s
    for side in ("L", "R"):
        have = Counter(cur.left if side == "L" else cur.right)
        want = Counter(core.left if side == "L" else core.right)
        for f in sorted(want):
            while have[f] < want[f]:
                if have[f] == 0 or (cap is not None and want[f] > cap):
                    return None
                steps.append(("Con" + side, cur))
                cur = cur.add(left=[f]) if side == "L" else cur.add(right=[f])
                have[f] += 1
    for side in ("L", "R"):
        have = Counter(cur.left if side == "L" else cur.right)
        want = Counter(core.left if side == "L" else core.right)
        for f in sorted(have):
            for _ in range(have[f] - want[f]):
                steps.append(("W" + side, cur))
                cur = Sequent(ms_remove(cur.left, f), cur.right) if side == "L" \
                    else Sequent(cur.left, ms_remove(cur.right, f))
    return steps


def wrap_chain(node: Node, chain: list[tuple[str, Sequent]]) -> Node:
    for rule, concl in reversed(chain):
        node = Node(rule, concl, (node,))
    return node


# search

@dataclass(frozen=True)
class _Candidate:
    rule: str
    core: Sequent
    premises: tuple[Sequent, ...]


@dataclass
class _SeqSearch:
    spec: LogicSpec
    budget: SearchBudget
    stats: SearchStats = field(default_factory=SearchStats)
    failed: dict[Sequent, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.registry = seq_rules_for(self.spec)

    def prove(self, s: Sequent, depth: int, level: int = 1) -> SeqNode | None:
        self.stats.nodes += 1
        self.stats.max_depth = max(self.stats.max_depth, level)
        if self.stats.nodes > self.budget.node_cap:
            raise NodeCapReached
        rule = closing_rule(s)
        if rule:
            return SeqNode(rule, s)
        if depth <= 0 or self.failed.get(s, -1) >= depth:
            return None
        out = self._expand(s, depth, level)
        if out is None:
            self.failed[s] = max(depth, self.failed.get(s, -1))
        return out

    def _all(self, prems: Sequence[Sequent], depth: int, level: int) -> list[SeqNode] | None:
        out = []
        for p in prems:
            sub = self.prove(p, depth, level + 1)
            if sub is None:
                return None
            out.append(sub)
        return out

    def _expand(self, s: Sequent, depth: int, level: int) -> SeqNode | None:
        step = first_prop_step(s)
        if step is not None:
            subs = self._all(step.premises, depth - 1, level)
            return SeqNode(step.rule, s, tuple(subs)) if subs is not None else None
        sat = self._saturate(s)
        if sat is not None:
            rule, prem = sat
            cost = 0 if rule in STRUCTURAL_RULES else 1
            sub = self.prove(prem, depth - cost, level + 1)
            return SeqNode(rule, s, (sub,)) if sub is not None else None
        for cand in self._candidates(s):
            chain = self._chain(s, cand.core)
            if chain is None:
                continue
            subs = self._all(cand.premises, depth - 1, level + len(chain))
            if subs is None:
                continue
            return wrap_chain(SeqNode(cand.rule, cand.core, tuple(subs)), chain)
        return None

    def _chain(self, s: Sequent, core: Sequent) -> list[tuple[str, Sequent]] | None:
        return structural_chain(s, core, max(self.budget.contraction_cap, 1))

    def _saturate(self, s: Sequent) -> tuple[str, Sequent] | None:
        cap = self.budget.contraction_cap
        counts = Counter(s.left)
        spec = self.spec
        for f in sorted(counts):
            if not isinstance(f, Box):
                continue
            if isinstance(spec, SimplyDependent):
                has_t = spec.description.has(f.index, T)
                has_4 = spec.description.has(f.index, FOUR)
                t_rule = indexed("t", f.index, spec)
            elif isinstance(spec, Monotone):
                has_t = T in spec.axioms
                has_4 = FOUR in spec.axioms
                t_rule = "T"
            else:
                return None
            if has_t and not unpacked(f.body, s):
                if counts[f] < cap:
                    return "ConL", s.add(left=[f])
                return t_rule, Sequent(ms_remove(s.left, f) + (f.body,), s.right)
            if has_4 and counts[f] < min(cap, 2):
                return "ConL", s.add(left=[f])
        if isinstance(spec, Monotone) and FIVE in spec.axioms:
            right = Counter(s.right)
            for f in sorted(right):
                if isinstance(f, Box) and right[f] < min(cap, 2):
                    return "ConR", s.add(right=[f])
        return None

    def _candidates(self, s: Sequent) -> Iterator[_Candidate]:
        match self.spec:
            case SimplyDependent():
                yield from self._sd_candidates(s)
            case ClassicalCube():
                yield from self._cube_candidates(s)
            case Monotone():
                yield from self._monotone_candidates(s)

    def _sd_candidates(self, s: Sequent) -> Iterator[_Candidate]:
        spec = self.spec
        assert isinstance(spec, SimplyDependent)
        d = spec.description
        upsets = spec.upsets

        def feed(i: int) -> list[Formula] | None:
            up = upsets[i]
            out: list[Formula] = []
            counts = Counter(f for f in s.left if isinstance(f, Box) and f.index in up.up)
            for f, c in sorted(counts.items()):
                if f.index in up.up4 and c >= 2:
                    out += [f, f.body]
                else:
                    out.append(f.body)
            return out

        for f in sorted(set(s.right)):
            if isinstance(f, Box) and f.index in d.indices:
                yield _Candidate(indexed("k", f.index, spec), s, (Sequent(feed(f.index), (f.body,)),))
        for i in sorted(d.indices):
            if d.has(i, D):
                left = feed(i)
                if left:
                    yield _Candidate(indexed("d", i, spec), s, (Sequent(left, ()),))

    def _cube_candidates(self, s: Sequent) -> Iterator[_Candidate]:
        ax = self.spec.axioms  # type: ignore[attr-defined]
        lboxes = _boxes(s.left)
        rules = self.registry.modal
        for f in sorted(set(_boxes(s.right))):
            b = f.body  # type: ignore[attr-defined]
            if M in ax:
                if C in ax:
                    if lboxes or N in ax:
                        yield _Candidate("Mn", s, (Sequent([g.body for g in lboxes], (b,)),))  # type: ignore[attr-defined]
                else:
                    for g in sorted(set(lboxes)):
                        yield _Candidate("M", s, (Sequent((g.body,), (b,)),))  # type: ignore[attr-defined]
            else:
                if C in ax:
                    for sub in _sub_multisets(lboxes):
                        bodies = [g.body for g in sub]  # type: ignore[attr-defined]
                        backs = tuple(Sequent((b,), (a,)) for a in ms(bodies))
                        yield _Candidate("En", s, (Sequent(bodies, (b,)),) + backs)
                else:
                    for g in sorted(set(lboxes)):
                        a = g.body  # type: ignore[attr-defined]
                        yield _Candidate("E", s, (Sequent((a,), (b,)), Sequent((b,), (a,))))
            if "N" in rules:
                yield _Candidate("N", s, (Sequent((), (b,)),))

    def _monotone_candidates(self, s: Sequent) -> Iterator[_Candidate]:
        ax = self.spec.axioms  # type: ignore[attr-defined]
        lb = _boxes(s.left)
        rb = _boxes(s.right)
        ser = P in ax or D in ax

        def core(left: Sequence[Formula], right: Sequence[Formula]) -> Sequent:
            return Sequent(tuple(left), tuple(right))

        if C in ax:
            gamma, sigma = [], []
            for f, c in sorted(Counter(lb).items()):
                if c >= 2 and FOUR in ax:
                    gamma.append(f)
                    sigma += [f.body] * (c - 1)  # type: ignore[attr-defined]
                else:
                    sigma += [f.body] * c  # type: ignore[attr-defined]
            for f in sorted(set(rb)):
                a = f.body  # type: ignore[attr-defined]
                others = ms_remove(ms(rb), f)
                if {N, FOUR, FIVE} <= ax:
                    yield _Candidate("K45", core(lb, rb), (Sequent(gamma + sigma, (a,) + others),))
                elif {N, FOUR} <= ax:
                    yield _Candidate("K4", core(lb, [f]), (Sequent(gamma + sigma, (a,)),))
                elif FOUR in ax and lb:
                    yield _Candidate("C4", core(lb, [f]), (Sequent(gamma + sigma, (a,)),))
                elif lb:
                    yield _Candidate("C", core(lb, [f]), (Sequent([g.body for g in lb], (a,)),))  # type: ignore[attr-defined]
                if N in ax and not lb and FOUR not in ax:
                    yield _Candidate("N", core([], [f]), (Sequent((), (a,)),))
            if ser and lb:
                if {N, FOUR, FIVE} <= ax:
                    yield _Candidate("KD45", core(lb, rb), (Sequent(gamma + sigma, rb),))
                elif FOUR in ax:
                    yield _Candidate("CD4", core(lb, []), (Sequent(gamma + sigma, ()),))
                else:
                    yield _Candidate("CD", core(lb, []), (Sequent([g.body for g in lb], ()),))  # type: ignore[attr-defined]
            return

        ldistinct = sorted(set(lb))
        rdistinct = sorted(set(rb))
        for f in rdistinct:
            b = f.body  # type: ignore[attr-defined]
            for g in ldistinct:
                a = g.body  # type: ignore[attr-defined]
                yield _Candidate("M", core([g], [f]), (Sequent((a,), (b,)),))
                if FOUR in ax:
                    yield _Candidate("4", core([g], [f]), (Sequent((g,), (b,)),))
                if D in ax and FIVE in ax:
                    yield _Candidate("D5", core([g], [f]), (Sequent((a,), (f,)),))
            if N in ax:
                yield _Candidate("N", core([], [f]), (Sequent((), (b,)),))
            if FIVE in ax:
                for g in rdistinct:
                    if g != f or Counter(rb)[f] >= 2:
                        yield _Candidate("5", core([], [f, g]), (Sequent((), (b, g)),))
        for g in ldistinct:
            if P in ax:
                yield _Candidate("P", core([g], []), (Sequent((g.body,), ()),))  # type: ignore[attr-defined]
        if D in ax:
            for i, g in enumerate(ldistinct):
                for h in ldistinct[i:]:
                    yield _Candidate("D", core([g, h], []), (Sequent((g.body, h.body), ()),))  # type: ignore[attr-defined]
            if FOUR in ax:
                for g in ldistinct:
                    for h in ldistinct:
                        yield _Candidate("D4", core([g, h], []), (Sequent((g.body, h), ()),))  # type: ignore[attr-defined]


def _sub_multisets(items: Sequence[Formula]) -> Iterator[list[Formula]]:
    """Nonempty sub-multisets, smallest first, without repeats."""
    items = sorted(items)
    seen = set()
    for k in range(1, len(items) + 1):
        for combo in combinations(items, k):
            if combo not in seen:
                seen.add(combo)
                yield list(combo)


def seq_prove(goal: Sequent, spec: LogicSpec, bound: SearchBudget | None = None) -> ProofResult:
    """Bounded backward search.  The depth bound counts logical and modal
    rule applications on a branch; contractions and weakenings inserted
    by the search are free."""
    bound = bound or SearchBudget()
    search = _SeqSearch(spec, bound)
    try:
        node = search.prove(goal, bound.depth)
    except NodeCapReached:
        search.stats.node_cap_hit = True
        return Exhausted(search.stats)
    if node is None:
        return Exhausted(search.stats)
    return Proved(node, search.stats)
