"""Search budgets and proof-search results shared by every prover."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any

DEFAULT_DEPTH = 20
DEFAULT_CONTRACTION_CAP = 2
DEFAULT_NODE_CAP = 10**6
BUDGET_ENV = "LNSPROVE_BUDGET"


@dataclass(frozen=True)
class SearchBudget:
    depth: int = DEFAULT_DEPTH
    contraction_cap: int = DEFAULT_CONTRACTION_CAP
    node_cap: int = DEFAULT_NODE_CAP

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise ValueError("budget depth must be at least 1")
        if self.contraction_cap < 0 or self.node_cap < 0:
            raise ValueError("budget caps must be non-negative")

    def scaled(self, factor: int, extra: int = 0) -> SearchBudget:
        return SearchBudget(self.depth * factor + extra, self.contraction_cap, self.node_cap)

    def deeper(self, extra: int) -> SearchBudget:
        return SearchBudget(self.depth + extra, self.contraction_cap, self.node_cap)

    @classmethod
    def from_env(cls, env: dict[str, str] | None = None) -> SearchBudget:
        """Read defaults such as ``depth=30,contraction_cap=2`` from the
        ``LNSPROVE_BUDGET`` environment variable."""
        raw = (env if env is not None else os.environ).get(BUDGET_ENV, "")
        values: dict[str, int] = {}
        for part in filter(None, (p.strip() for p in raw.split(","))):
            key, _, value = part.partition("=")
            key = key.strip()
            if key not in ("depth", "contraction_cap", "node_cap"):
                raise ValueError(f"unknown budget field {key!r} in {BUDGET_ENV}")
            values[key] = int(value)
        return cls(**values)


@dataclass
class SearchStats:
    nodes: int = 0
    max_depth: int = 0
    node_cap_hit: bool = False

    def as_dict(self) -> dict[str, Any]:
        return {"nodes": self.nodes, "max_depth": self.max_depth, "node_cap_hit": self.node_cap_hit}


@dataclass
class Proved:
    derivation: Any
    stats: SearchStats = field(default_factory=SearchStats)
    proved = True


@dataclass
class Exhausted:
    stats: SearchStats = field(default_factory=SearchStats)
    proved = False


ProofResult = Proved | Exhausted


class NodeCapReached(Exception):
    pass
