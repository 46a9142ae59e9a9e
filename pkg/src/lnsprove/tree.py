"""Derivation trees shared by every calculus."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterator


@dataclass(frozen=True)
class Node:
    rule: str
    conclusion: Any
    premises: tuple[Node, ...] = ()

    def depth(self) -> int:
        """Longest branch plus one: a single leaf has depth 1."""
        return 1 + max((p.depth() for p in self.premises), default=0)

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def walk(self) -> Iterator[Node]:
        yield self
        for p in self.premises:
            yield from p.walk()

    def walk_paths(self, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Node]]:
        yield path, self
        for k, p in enumerate(self.premises):
            yield from p.walk_paths(path + (k,))

    def map(self, fn: Callable[[Any], Any]) -> Node:
        """Same tree shape with ``fn`` applied to every conclusion."""
        return Node(self.rule, fn(self.conclusion), tuple(p.map(fn) for p in self.premises))

    def rules(self) -> list[str]:
        return [n.rule for n in self.walk()]


@dataclass
class CheckReport:
    ok: bool
    path: tuple[int, ...] = ()
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok
