"""Modal formula AST with an ASCII parser and printer.

Grammar, tightest binding first::

    atom      [a-z][a-zA-Z0-9_]*  |  bot  |  top
    unary     ~A  |  []A  |  [n]A
    binary    A & B   >   A | B   >   A -> B   (-> associates to the right)

``[]`` is the box at index 0.  Diamonds are written ``~[]~A``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator


class Formula:
    """Base class.  Subclasses are immutable and hash-consed by value."""

    __slots__ = ()
    _rank = 0

    @property
    def key(self) -> tuple:
        return self._key  # type: ignore[attr-defined]

    def __lt__(self, other: Formula) -> bool:
        return self.key < other.key

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Formula):
            return NotImplemented
        return self._hash == other._hash and self.key == other.key  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        return self._hash  # type: ignore[attr-defined]

    def __str__(self) -> str:
        return show(self)

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children())

    def children(self) -> tuple[Formula, ...]:
        return ()

    def subformulas(self) -> Iterator[Formula]:
        yield self
        for c in self.children():
            yield from c.subformulas()

    def indices(self) -> set[int]:
        return {f.index for f in self.subformulas() if isinstance(f, Box)}

    def atoms(self) -> set[str]:
        return {f.name for f in self.subformulas() if isinstance(f, Atom)}


def _seal(obj: Formula, key: tuple) -> None:
    object.__setattr__(obj, "_key", key)
    object.__setattr__(obj, "_hash", hash(key))


@dataclass(frozen=True, eq=False, repr=False)
class Atom(Formula):
    name: str
    _key: tuple = field(init=False, compare=False)
    _hash: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("atom names must be nonempty")
        _seal(self, (0, self.name))

    def __repr__(self) -> str:
        return f"Atom({self.name!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Bottom(Formula):
    _key: tuple = field(init=False, compare=False)
    _hash: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        _seal(self, (1,))

    def __repr__(self) -> str:
        return "Bottom()"


@dataclass(frozen=True, eq=False, repr=False)
class Top(Formula):
    _key: tuple = field(init=False, compare=False)
    _hash: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        _seal(self, (2,))

    def __repr__(self) -> str:
        return "Top()"


@dataclass(frozen=True, eq=False, repr=False)
class Neg(Formula):
    body: Formula
    _key: tuple = field(init=False, compare=False)
    _hash: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        _seal(self, (3, self.body.key))

    def children(self) -> tuple[Formula, ...]:
        return (self.body,)

    def __repr__(self) -> str:
        return f"Neg({self.body!r})"


@dataclass(frozen=True, eq=False, repr=False)
class _Binary(Formula):
    left: Formula
    right: Formula
    _key: tuple = field(init=False, compare=False)
    _hash: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        _seal(self, (self._rank, self.left.key, self.right.key))

    def children(self) -> tuple[Formula, ...]:
        return (self.left, self.right)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class And(_Binary):
    _rank = 4


class Or(_Binary):
    _rank = 5


class Imp(_Binary):
    _rank = 6


@dataclass(frozen=True, eq=False, repr=False)
class Box(Formula):
    index: int
    body: Formula
    _key: tuple = field(init=False, compare=False)
    _hash: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("modal indices are natural numbers")
        _seal(self, (7, self.index, self.body.key))

    def children(self) -> tuple[Formula, ...]:
        return (self.body,)

    def __repr__(self) -> str:
        return f"Box({self.index}, {self.body!r})"


BOT = Bottom()
TOP = Top()


def diamond(body: Formula, index: int = 0) -> Formula:
    return Neg(Box(index, Neg(body)))


def conj(items: Iterable[Formula]) -> Formula:
    """Right-nested conjunction; the empty conjunction is top."""
    items = list(items)
    if not items:
        return TOP
    out = items[-1]
    for f in reversed(items[:-1]):
        out = And(f, out)
    return out


def disj(items: Iterable[Formula]) -> Formula:
    """Right-nested disjunction; the empty disjunction is bottom."""
    items = list(items)
    if not items:
        return BOT
    out = items[-1]
    for f in reversed(items[:-1]):
        out = Or(f, out)
    return out


# printing

_PREC = {Imp: 1, Or: 2, And: 3}


def show(f: Formula) -> str:
    match f:
        case Atom(name=name):
            return name
        case Bottom():
            return "bot"
        case Top():
            return "top"
        case Neg(body=b):
            return "~" + _show_operand(b)
        case Box(index=i, body=b):
            return ("[]" if i == 0 else f"[{i}]") + _show_operand(b)
        case Imp(left=l, right=r):
            # right associative: only the left side needs parentheses
            return f"{_wrap(l, 1, strict=True)} -> {_wrap(r, 1, strict=False)}"
        case Or(left=l, right=r) | And(left=l, right=r):
            p = _PREC[type(f)]
            op = " | " if isinstance(f, Or) else " & "
            return f"{_wrap(l, p, strict=False)}{op}{_wrap(r, p, strict=True)}"
    raise TypeError(f"not a formula: {f!r}")


def _show_operand(f: Formula) -> str:
    s = show(f)
    return f"({s})" if isinstance(f, _Binary) else s


def _wrap(f: Formula, prec: int, strict: bool) -> str:
    s = show(f)
    fp = _PREC.get(type(f))
    if fp is None:
        return s
    if fp < prec or (strict and fp == prec):
        return f"({s})"
    return s


# parsing

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UndeclaredIndexError(ValueError):
    def __init__(self, index: int, position: int, declared: Iterable[int]):
        declared = sorted(declared)
        super().__init__(
            f"modal index {index} at position {position} is not declared "
            f"(declared: {declared})"
        )
        self.index = index
        self.position = position


_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<box>\[\s*(?P<idx>\d*)\s*\])|(?P<dia><\s*(?P<didx>\d*)\s*>)|(?P<ident>[a-zA-Z][a-zA-Z0-9_]*)"
    r"|(?P<sym>[~&|()]))"
)


def _tokenize(text: str) -> list[tuple[str, str | int | None, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.group("arrow"):
            tokens.append(("->", None, m.start("arrow")))
        elif m.group("box") is not None:
            idx = m.group("idx")
            tokens.append(("box", int(idx) if idx else 0, m.start("box")))
        elif m.group("dia") is not None:
            idx = m.group("didx")
            tokens.append(("dia", int(idx) if idx else 0, m.start("dia")))
        elif m.group("ident"):
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append((m.group("sym"), None, m.start("sym")))
        pos = m.end()
    tokens.append(("eof", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, declared: set[int] | None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.declared = declared

    def peek(self) -> tuple[str, object, int]:
        return self.tokens[self.i]

    def take(self, kind: str) -> tuple[str, object, int]:
        tok = self.tokens[self.i]
        if tok[0] != kind:
            raise FormulaSyntaxError(f"expected {kind!r}, found {tok[0]!r}", tok[2])
        self.i += 1
        return tok

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek()[0] == "->":
            self.i += 1
            return Imp(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        out = self.conjunction()
        while self.peek()[0] == "|":
            self.i += 1
            out = Or(out, self.conjunction())
        return out

    def conjunction(self) -> Formula:
        out = self.unary()
        while self.peek()[0] == "&":
            self.i += 1
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "~":
            self.i += 1
            return Neg(self.unary())
        if kind in ("box", "dia"):
            self.i += 1
            assert isinstance(value, int)
            if self.declared is not None and value not in self.declared:
                raise UndeclaredIndexError(value, pos, self.declared)
            body = self.unary()
            return Box(value, body) if kind == "box" else diamond(body, value)
        if kind == "(":
            self.i += 1
            inner = self.formula()
            self.take(")")
            return inner
        if kind == "ident":
            self.i += 1
            if value == "bot":
                return BOT
            if value == "top":
                return TOP
            return Atom(str(value))
        raise FormulaSyntaxError(f"unexpected {kind!r}", pos)


def parse_formula(text: str, indices: Iterable[int] | None = None) -> Formula:
    """Parse ``text``; if ``indices`` is given, every box index must be in it."""
    parser = _Parser(text, set(indices) if indices is not None else None)
    out = parser.formula()
    kind, _, pos = parser.peek()
    if kind != "eof":
        raise FormulaSyntaxError(f"trailing input {kind!r}", pos)
    return out
