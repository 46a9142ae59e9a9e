"""Logic specifications: simply dependent descriptions, the classical cube
and the monotone family, plus presets and a small key/value file format.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

D, T, FOUR, FIVE = "D", "T", "4", "5"
M, C, N, P = "M", "C", "N", "P"

DESCRIPTION_AXIOMS = frozenset({D, T, FOUR})
CUBE_AXIOMS = frozenset({M, C, N})
MONOTONE_AXIOMS = frozenset({C, N, P, D, T, FOUR, FIVE})

_ALIASES = {"four": FOUR, "five": FIVE}


class LogicSpecError(ValueError):
    pass


class NotPartialOrder(LogicSpecError):
    pass


class NotTransitiveClosed(LogicSpecError):
    def __init__(self, lower: int, upper: int):
        super().__init__(
            f"not transitive-closed: {lower} < {upper} but 4 holds at {lower} "
            f"and not at {upper}"
        )
        self.pair = (lower, upper)


class UnsupportedFiveCombination(LogicSpecError):
    pass


def _axiom(name: str) -> str:
    name = name.strip()
    return _ALIASES.get(name.lower(), name.upper())


@dataclass(frozen=True)
class Description:
    indices: frozenset[int]
    order: frozenset[tuple[int, int]]
    axioms: Mapping[int, frozenset[str]]
    # filled in by validate_description
    report: tuple[str, ...] = field(default=(), compare=False)

    def __hash__(self) -> int:
        return hash((self.indices, self.order, tuple(sorted((i, tuple(sorted(a))) for i, a in self.axioms.items()))))

    def leq(self, i: int, j: int) -> bool:
        return (i, j) in self.order

    def has(self, i: int, axiom: str) -> bool:
        return axiom in self.axioms.get(i, frozenset())


def make_description(
    indices: Iterable[int],
    order: Iterable[tuple[int, int]] = (),
    axioms: Mapping[int, Iterable[str]] | None = None,
) -> Description:
    """Build and validate a description; reflexive pairs are added."""
    idx = frozenset(indices)
    pairs = set(order) | {(i, i) for i in idx}
    ax = {i: frozenset(_axiom(a) for a in (axioms or {}).get(i, ())) for i in idx}
    return validate_description(Description(idx, frozenset(pairs), ax))


def validate_description(raw: Description) -> Description:
    """Check the partial-order laws and transitive-closedness, then close
    D and T upwards.  T implies D, since KD is contained in KT."""
    idx = raw.indices
    if not idx:
        raise NotPartialOrder("the index set is empty")
    for i, j in raw.order:
        if i not in idx or j not in idx:
            raise NotPartialOrder(f"pair ({i}, {j}) uses an undeclared index")
    for i in idx:
        if (i, i) not in raw.order:
            raise NotPartialOrder(f"order is not reflexive at {i}")
    for i, j in raw.order:
        if i != j and (j, i) in raw.order:
            raise NotPartialOrder(f"order is not antisymmetric: {i} and {j}")
        for k, l in raw.order:
            if j == k and (i, l) not in raw.order:
                raise NotPartialOrder(f"order is not transitive: {i} < {j} < {l}")
    for i, axs in raw.axioms.items():
        bad = set(axs) - DESCRIPTION_AXIOMS
        if bad:
            raise LogicSpecError(f"unsupported axioms {sorted(bad)} at index {i}")
    for i, j in sorted(raw.order):
        if raw.has(i, FOUR) and not raw.has(j, FOUR):
            raise NotTransitiveClosed(i, j)

    axioms = {i: set(raw.axioms.get(i, ())) for i in idx}
    report = list(raw.report)
    for i in sorted(idx):
        if T in axioms[i] and D not in axioms[i]:
            axioms[i].add(D)
            report.append(f"D added at {i} (implied by T)")
    for i, j in sorted(raw.order):
        for ax in (D, T):
            if ax in axioms[i] and ax not in axioms[j]:
                axioms[j].add(ax)
                report.append(f"{ax} added at {j} (upward closure from {i})")
    return Description(idx, raw.order, {i: frozenset(a) for i, a in axioms.items()}, tuple(report))


@dataclass(frozen=True)
class Upsets:
    up: frozenset[int]
    up4: frozenset[int]
    upnot4: frozenset[int]
    upD: frozenset[int]
    upT: frozenset[int]


UpsetTable = dict[int, Upsets]


def compute_upsets(d: Description) -> UpsetTable:
    table = {}
    for i in sorted(d.indices):
        up = frozenset(j for j in d.indices if d.leq(i, j))
        table[i] = Upsets(
            up=up,
            up4=frozenset(j for j in up if d.has(j, FOUR)),
            upnot4=frozenset(j for j in up if not d.has(j, FOUR)),
            upD=frozenset(j for j in up if d.has(j, D)),
            upT=frozenset(j for j in up if d.has(j, T)),
        )
    return table


# logic specifications

class LogicSpec:
    family: str = ""

    @property
    def indices(self) -> frozenset[int]:
        return frozenset({0})

    @property
    def name(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class SimplyDependent(LogicSpec):
    description: Description
    label: str = field(default="", compare=False)
    family = "simply-dependent"

    @property
    def indices(self) -> frozenset[int]:
        return self.description.indices

    @property
    def upsets(self) -> UpsetTable:
        return compute_upsets(self.description)

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        d = self.description
        parts = []
        for i in sorted(d.indices):
            parts.append(f"{i}:K" + "".join(a for a in (D, T, FOUR) if d.has(i, a)))
        order = [f"{i}<{j}" for i, j in sorted(d.order) if i != j]
        return " ".join(parts + order)


@dataclass(frozen=True)
class ClassicalCube(LogicSpec):
    axioms: frozenset[str]
    family = "classical-cube"

    def __post_init__(self) -> None:
        bad = set(self.axioms) - CUBE_AXIOMS
        if bad:
            raise LogicSpecError(f"unsupported classical-cube axioms {sorted(bad)}")

    @property
    def name(self) -> str:
        head = "M" if M in self.axioms else "E"
        return head + "".join(a for a in (C, N) if a in self.axioms)


_FIVE_LOGICS = {
    "M5": {N, FIVE},
    "MP5": {N, P, FIVE},
    "M45": {N, FOUR, FIVE},
    "MP45": {N, P, FOUR, FIVE},
    "MD45": {N, P, D, FOUR, FIVE},
    "K45": {C, N, FOUR, FIVE},
    "KD45": {C, N, P, D, FOUR, FIVE},
}


def _seriality_closure(axioms: set[str]) -> set[str]:
    out = set(axioms)
    if T in out:
        out.add(D)
    if D in out:
        out.add(P)
    if C in out and P in out:
        out.add(D)
    return out


@dataclass(frozen=True)
class Monotone(LogicSpec):
    axioms: frozenset[str]
    report: tuple[str, ...] = field(default=(), compare=False)
    family = "monotone"

    @property
    def name(self) -> str:
        ax = self.axioms
        normal = C in ax and N in ax
        head = "K" if normal else "M"
        rest = [a for a in (C, N) if a in ax and not normal]
        rest += [a for a in (P, D, T, FOUR, FIVE) if a in ax]
        if FIVE in ax:
            # N is implicit in the names of the 5-logics
            rest = [a for a in rest if a != N]
        return head + "".join(rest)


def make_monotone(axioms: Iterable[str]) -> Monotone:
    ax = {_axiom(a) for a in axioms}
    bad = ax - MONOTONE_AXIOMS
    if bad:
        raise LogicSpecError(f"unsupported monotone axioms {sorted(bad)}")
    report = []
    if FIVE in ax and N not in ax:
        ax.add(N)
        report.append("N added (derivable in every extension with 5)")
    if FIVE in ax:
        closed = _seriality_closure(ax)
        if not any(closed == _seriality_closure(v) for v in _FIVE_LOGICS.values()):
            raise UnsupportedFiveCombination(
                f"monotone axioms {sorted(ax)} with 5 have no cut-free calculus here; "
                f"supported 5-logics are {', '.join(_FIVE_LOGICS)}"
            )
    return Monotone(frozenset(ax), tuple(report))


def make_cube(axioms: Iterable[str]) -> ClassicalCube:
    return ClassicalCube(frozenset(_axiom(a) for a in axioms))


def monomodal(axioms: Iterable[str], label: str = "") -> SimplyDependent:
    return SimplyDependent(make_description([0], [], {0: list(axioms)}), label)


# presets

def kt_s4() -> SimplyDependent:
    d = make_description([1, 2], [(1, 2)], {1: [T], 2: [T, FOUR]})
    return SimplyDependent(d, "KT+S4")


_NORMAL = {"K": [], "KD": [D], "KT": [T], "K4": [FOUR], "KD4": [D, FOUR], "S4": [T, FOUR]}
_CUBE = {"E": "", "M": "M", "EC": "C", "EN": "N", "ECN": "CN", "MC": "MC", "MN": "MN", "MCN": "MCN"}

PRESET_NAMES = (
    list(_NORMAL) + ["KT+S4"] + list(_CUBE)
    + ["M.P", "M.D", "M.T", "M.4", "M.P4", "M.D4", "M5", "MP5", "M45", "MP45", "MD45", "K45", "KD45"]
)


def preset(name: str) -> LogicSpec:
    """Resolve a preset such as ``K``, ``EC``, ``M.P4`` or ``K45``."""
    key = name.strip()
    if key in _NORMAL:
        return monomodal(_NORMAL[key], key)
    if key in ("KT+S4", "KT⊕⊆S4", "KTS4"):
        return kt_s4()
    if key in _CUBE:
        return make_cube(_CUBE[key])
    m = re.fullmatch(r"([MK])\.?([CNPDT45]*)", key)
    if m:
        axioms = set(m.group(2))
        if m.group(1) == "K":
            axioms |= {C, N}
        return make_monotone(axioms)
    raise LogicSpecError(f"unknown logic preset {name!r}")


def parse_logic_spec(text: str) -> LogicSpec:
    """Parse the flat key/value format::

        family = simply-dependent
        indices = 1, 2
        order = 1<2
        axioms.1 = T
        axioms.2 = T, 4
    """
    fields: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"([A-Za-z][\w.]*)\s*[=:]\s*(.*)", line)
        if not m:
            raise LogicSpecError(f"line {lineno}: expected 'key = value'")
        fields[m.group(1).strip()] = m.group(2).strip()

    def items(value: str) -> list[str]:
        return [v for v in re.split(r"[,\s]+", value) if v]

    family = fields.pop("family", None)
    if family is None:
        raise LogicSpecError("missing 'family'")
    if family == "classical-cube":
        return make_cube(items(fields.get("axioms", "")))
    if family == "monotone":
        return make_monotone(items(fields.get("axioms", "")))
    if family != "simply-dependent":
        raise LogicSpecError(f"unknown family {family!r}")

    try:
        indices = [int(v) for v in items(fields.get("indices", "0"))]
        order = []
        for pair in items(fields.get("order", "")):
            lo, hi = pair.split("<")
            order.append((int(lo), int(hi)))
    except ValueError as exc:
        raise LogicSpecError(f"bad indices or order: {exc}") from None
    shared = items(fields.get("axioms", ""))
    axioms: dict[int, list[str]] = {i: list(shared) for i in indices}
    for key, value in fields.items():
        if key.startswith("axioms."):
            i = int(key.split(".", 1)[1])
            if i not in axioms:
                raise LogicSpecError(f"axioms given for undeclared index {i}")
            axioms[i] += items(value)
    return SimplyDependent(make_description(indices, order, axioms), fields.get("name", ""))


def resolve_logic(source: str) -> LogicSpec:
    """A preset name, a path to a spec file, or inline spec text."""
    import os

    if "\n" in source or "=" in source:
        return parse_logic_spec(source)
    if os.path.isfile(source):
        with open(source, encoding="utf-8") as fh:
            return parse_logic_spec(fh.read())
    return preset(source)


def spec_to_dict(spec: LogicSpec) -> dict:
    """A JSON-ready snapshot that ``spec_from_dict`` rebuilds exactly."""
    if isinstance(spec, SimplyDependent):
        d = spec.description
        return {
            "family": spec.family,
            "name": spec.name,
            "indices": sorted(d.indices),
            "order": [[i, j] for i, j in sorted(d.order) if i != j],
            "axioms": {str(i): sorted(d.axioms.get(i, ())) for i in sorted(d.indices)},
        }
    if isinstance(spec, (ClassicalCube, Monotone)):
        return {"family": spec.family, "name": spec.name, "axioms": sorted(spec.axioms)}
    raise TypeError(f"unknown logic spec {spec!r}")


def spec_from_dict(data: dict) -> LogicSpec:
    family = data.get("family")
    if family == "simply-dependent":
        d = make_description(data["indices"], [tuple(p) for p in data["order"]],
                             {int(i): a for i, a in data["axioms"].items()})
        return SimplyDependent(d, data.get("name", ""))
    if family == "classical-cube":
        return make_cube(data["axioms"])
    if family == "monotone":
        return make_monotone(data["axioms"])
    raise LogicSpecError(f"unknown family {family!r}")
