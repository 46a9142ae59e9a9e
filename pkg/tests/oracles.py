"""Brute-force semantic oracles for the provers: truth tables, Kripke
frames and neighbourhood models over at most a few worlds.

They are used in one direction only: a formula with a small countermodel
must not be provable.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, product

from lnsprove.formula import And, Atom, Bottom, Box, Formula, Imp, Neg, Or, Top
from lnsprove.logic import C, D, FIVE, FOUR, M, N, P, T, ClassicalCube, LogicSpec, Monotone, SimplyDependent


def truth_value(f: Formula, val: dict[str, bool]) -> bool:
    match f:
        case Atom(name=n):
            return val[n]
        case Bottom():
            return False
        case Top():
            return True
        case Neg(body=b):
            return not truth_value(b, val)
        case And(left=l, right=r):
            return truth_value(l, val) and truth_value(r, val)
        case Or(left=l, right=r):
            return truth_value(l, val) or truth_value(r, val)
        case Imp(left=l, right=r):
            return not truth_value(l, val) or truth_value(r, val)
    raise TypeError(f"not propositional: {f}")


def tautology(f: Formula) -> bool:
    atoms = sorted(f.atoms())
    return all(truth_value(f, dict(zip(atoms, bits))) for bits in product((False, True), repeat=len(atoms)))


# models: worlds are 0..n-1, a box is evaluated through ``box(w, extension)``

def _truth_set(f: Formula, n: int, val: dict[str, frozenset[int]], box) -> frozenset[int]:
    everything = frozenset(range(n))
    match f:
        case Atom(name=name):
            return val[name]
        case Bottom():
            return frozenset()
        case Top():
            return everything
        case Neg(body=b):
            return everything - _truth_set(b, n, val, box)
        case And(left=l, right=r):
            return _truth_set(l, n, val, box) & _truth_set(r, n, val, box)
        case Or(left=l, right=r):
            return _truth_set(l, n, val, box) | _truth_set(r, n, val, box)
        case Imp(left=l, right=r):
            return (everything - _truth_set(l, n, val, box)) | _truth_set(r, n, val, box)
        case Box(index=i, body=b):
            ext = _truth_set(b, n, val, box)
            return frozenset(w for w in range(n) if box(i, w, ext))
    raise TypeError(f"not a formula: {f}")


def _valuations(atoms: list[str], n: int):
    subsets = [frozenset(s) for k in range(n + 1) for s in combinations(range(n), k)]
    for choice in product(subsets, repeat=len(atoms)):
        yield dict(zip(atoms, choice))


# Kripke frames for normal logics

def _relation_ok(r: frozenset[tuple[int, int]], n: int, props: frozenset[str]) -> bool:
    succ = {w: {v for u, v in r if u == w} for w in range(n)}
    if "serial" in props and any(not succ[w] for w in range(n)):
        return False
    if "reflexive" in props and any(w not in succ[w] for w in range(n)):
        return False
    if "transitive" in props and any(x not in succ[w] for w in range(n) for v in succ[w] for x in succ[v]):
        return False
    if "euclidean" in props and any(x not in succ[v] for w in range(n) for v in succ[w] for x in succ[w]):
        return False
    return True


@lru_cache(maxsize=None)
def kripke_frames(n: int, props: frozenset[str]) -> list[frozenset[tuple[int, int]]]:
    pairs = [(a, b) for a in range(n) for b in range(n)]
    out = []
    for bits in product((False, True), repeat=len(pairs)):
        r = frozenset(p for p, bit in zip(pairs, bits) if bit)
        if _relation_ok(r, n, props):
            out.append(r)
    return out


def kripke_properties(spec: LogicSpec) -> frozenset[str] | None:
    """Frame conditions of a monomodal normal logic, or None."""
    if isinstance(spec, SimplyDependent):
        d = spec.description
        if d.indices != frozenset({0}):
            return None
        ax = d.axioms.get(0, frozenset())
    elif isinstance(spec, Monotone) and C in spec.axioms and N in spec.axioms and T not in spec.axioms:
        ax = spec.axioms
    else:
        return None
    props = set()
    if D in ax:
        props.add("serial")
    if T in ax:
        props.add("reflexive")
    if FOUR in ax:
        props.add("transitive")
    if FIVE in ax:
        props.add("euclidean")
    return frozenset(props)


def kripke_countermodel(f: Formula, props: frozenset[str], max_worlds: int = 3):
    atoms = sorted(f.atoms())
    for n in range(1, max_worlds + 1):
        for r in kripke_frames(n, props):
            succ = {w: frozenset(v for u, v in r if u == w) for w in range(n)}

            def box(i, w, ext, succ=succ):
                return succ[w] <= ext

            for val in _valuations(atoms, n):
                if _truth_set(f, n, val, box) != frozenset(range(n)):
                    return n, r, val
    return None


# neighbourhood models for the cube and monotone logics

def _neighbourhood_ok(nb: tuple[frozenset[frozenset[int]], ...], n: int, ax: frozenset[str]) -> bool:
    everything = frozenset(range(n))
    for w in range(n):
        sets = nb[w]
        if M in ax and any(y not in sets for x in sets for y in _supersets(x, n)):
            return False
        if C in ax and any(x & y not in sets for x in sets for y in sets):
            return False
        if N in ax and everything not in sets:
            return False
        if P in ax and frozenset() in sets:
            return False
        if D in ax and any(everything - x in sets for x in sets):
            return False
        if T in ax and any(w not in x for x in sets):
            return False
        if FOUR in ax and any(frozenset(v for v in range(n) if x in nb[v]) not in sets for x in sets):
            return False
        if FIVE in ax:
            for x in _all_subsets(n):
                if x not in sets and frozenset(v for v in range(n) if x not in nb[v]) not in sets:
                    return False
    return True


@lru_cache(maxsize=None)
def _all_subsets(n: int) -> tuple[frozenset[int], ...]:
    return tuple(frozenset(s) for k in range(n + 1) for s in combinations(range(n), k))


def _supersets(x: frozenset[int], n: int):
    return [y for y in _all_subsets(n) if x <= y]


@lru_cache(maxsize=None)
def neighbourhood_frames(n: int, ax: frozenset[str]) -> list[tuple[frozenset[frozenset[int]], ...]]:
    subsets = _all_subsets(n)
    families = [frozenset(s for s, bit in zip(subsets, bits) if bit)
                for bits in product((False, True), repeat=len(subsets))]
    return [nb for nb in product(families, repeat=n) if _neighbourhood_ok(nb, n, ax)]


def neighbourhood_axioms(spec: LogicSpec) -> frozenset[str] | None:
    if isinstance(spec, ClassicalCube):
        return frozenset(spec.axioms)
    if isinstance(spec, Monotone):
        return frozenset(spec.axioms | {M})
    return None


def neighbourhood_countermodel(f: Formula, ax: frozenset[str], max_worlds: int = 2):
    atoms = sorted(f.atoms())
    for n in range(1, max_worlds + 1):
        for nb in neighbourhood_frames(n, ax):
            def box(i, w, ext, nb=nb):
                return ext in nb[w]

            for val in _valuations(atoms, n):
                if _truth_set(f, n, val, box) != frozenset(range(n)):
                    return n, nb, val
    return None


def countermodel(f: Formula, spec: LogicSpec):
    """A small countermodel for ``f`` in the models of ``spec``, or None;
    also None when the logic has no brute-force semantics here."""
    props = kripke_properties(spec)
    if props is not None:
        return kripke_countermodel(f, props)
    ax = neighbourhood_axioms(spec)
    if ax is not None:
        return neighbourhood_countermodel(f, ax)
    return None
