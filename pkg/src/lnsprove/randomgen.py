"""Seeded random formulas for differential testing."""

from __future__ import annotations

import random
from typing import Sequence

from .formula import BOT, TOP, And, Atom, Box, Formula, Imp, Neg, Or
from .sequent import Sequent


def random_formula(rng: random.Random, size: int, atoms: Sequence[str] = ("p", "q"),
                   indices: Sequence[int] = (0,)) -> Formula:
    """A formula with exactly ``size`` symbols, boxes included."""
    if size <= 1:
        r = rng.random()
        if r < 0.06:
            return BOT
        if r < 0.1:
            return TOP
        return Atom(rng.choice(list(atoms)))
    if size == 2 or rng.random() < 0.45:
        body = random_formula(rng, size - 1, atoms, indices)
        if rng.random() < 0.75:
            return Box(rng.choice(list(indices)), body)
        return Neg(body)
    k = rng.randint(1, size - 2)
    left = random_formula(rng, k, atoms, indices)
    right = random_formula(rng, size - 1 - k, atoms, indices)
    return rng.choice((And, Or, Imp, Imp))(left, right)


def random_formulas(seed: int, count: int, max_size: int, atoms: Sequence[str] = ("p", "q"),
                    indices: Sequence[int] = (0,)) -> list[Formula]:
    rng = random.Random(seed)
    return [random_formula(rng, rng.randint(1, max_size), atoms, indices) for _ in range(count)]


def random_sequent(rng: random.Random, max_size: int, atoms: Sequence[str] = ("p", "q"),
                   indices: Sequence[int] = (0,), max_side: int = 2) -> Sequent:
    """One to ``2 * max_side`` formulas spread over both sides."""
    def side(lo: int) -> list[Formula]:
        return [random_formula(rng, rng.randint(1, max_size), atoms, indices)
                for _ in range(rng.randint(lo, max_side))]

    left = side(0)
    return Sequent(tuple(left), tuple(side(0 if left else 1)))
