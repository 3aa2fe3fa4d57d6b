"""Expression trees and a schedule-driven rewriting normalizer.

:func:`normal_order` evaluates a formal expression tree.  By default it folds
the tree with :func:`~fuzzydynsym.ncalg.algebra.multiply` (closed-form Wick
products).  Given a ``schedule`` it instead expands the tree into raw words
and rewrites each word with adjacent swaps

    x y  ->  y x + [x, y]        whenever y precedes x canonically,

choosing which redex to fire through the schedule.  The two routes share no
code below the term map, so agreement between them (and between schedules)
is a genuine confluence check.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Sequence, Union

from .algebra import (
    GaussianRational,
    Generator,
    OperatorPoly,
    ZERO,
    multiply,
)

__all__ = ["Expr", "Sum", "Product", "expand", "normal_order", "first_redex", "last_redex", "random_redex"]


class Sum(tuple):
    """Formal sum node."""

    def __new__(cls, *terms):
        return super().__new__(cls, terms)

    def __repr__(self) -> str:
        return "Sum" + super().__repr__()


class Product(tuple):
    """Formal (ordered) product node."""

    def __new__(cls, *factors):
        return super().__new__(cls, factors)

    def __repr__(self) -> str:
        return "Product" + super().__repr__()


Expr = Union[Sum, Product, Generator, OperatorPoly, int, Fraction, GaussianRational]

# A raw word: (coefficient, lam power, generators in written order)
RawWord = tuple[GaussianRational, int, tuple[Generator, ...]]
Schedule = Callable[[Sequence[int]], int]


def first_redex(positions: Sequence[int]) -> int:
    return positions[0]


def last_redex(positions: Sequence[int]) -> int:
    return positions[-1]


def random_redex(seed: int) -> Schedule:
    rng = random.Random(seed)
    return lambda positions: positions[rng.randrange(len(positions))]


def _poly_words(p: OperatorPoly) -> list[RawWord]:
    from .algebra import GENERATORS

    out = []
    for (lam_pow, word), c in p.items():
        gens = []
        for g, e in zip(GENERATORS, word):
            gens.extend([g] * e)
        out.append((c, lam_pow, tuple(gens)))
    return out


def expand(expr: Expr) -> list[RawWord]:
    """Distribute an expression tree into raw (unordered) words."""
    if isinstance(expr, Sum):
        out = []
        for t in expr:
            out.extend(expand(t))
        return out
    if isinstance(expr, Product):
        acc: list[RawWord] = [(GaussianRational(Fraction(1)), 0, ())]
        for f in expr:
            part = expand(f)
            acc = [(c1 * c2, l1 + l2, w1 + w2) for c1, l1, w1 in acc for c2, l2, w2 in part]
        return acc
    if isinstance(expr, Generator):
        return [(GaussianRational(Fraction(1)), 0, (expr,))]
    if isinstance(expr, OperatorPoly):
        return _poly_words(expr)
    return [(GaussianRational.coerce(expr), 0, ())]


def _redexes(word: tuple[Generator, ...]) -> list[int]:
    return [i for i in range(len(word) - 1) if word[i].index > word[i + 1].index]


def _rewrite_word(c: GaussianRational, lam_pow: int, word: tuple[Generator, ...], schedule: Schedule) -> OperatorPoly:
    acc: dict = {}
    stack = [(c, word)]
    while stack:
        coef, w = stack.pop()
        pos = _redexes(w)
        if not pos:
            exps = [0] * 8
            for g in w:
                exps[g.index] += 1
            key = (lam_pow, tuple(exps))
            acc[key] = acc[key] + coef if key in acc else coef
            continue
        i = schedule(pos)
        x, y = w[i], w[i + 1]
        swapped = w[:i] + (y, x) + w[i + 2 :]
        stack.append((coef, swapped))
        # only an annihilator followed by its own creator has a nonzero bracket
        if not x.daggered and y == x.dagger():
            stack.append((coef * x.sign, w[:i] + w[i + 2 :]))
    return OperatorPoly(acc)


def normal_order(expr: Expr, schedule: Schedule | None = None) -> OperatorPoly:
    """Canonical form of a formal expression.

    Without a schedule the tree is folded with exact Wick products; with one,
    each expanded word is rewritten by adjacent swaps in the order the
    schedule picks.  Both routes give the same polynomial.
    """
    if schedule is None:
        return _fold(expr)
    out = ZERO
    for c, lam_pow, word in expand(expr):
        out = out + _rewrite_word(c, lam_pow, word, schedule)
    return out


def _fold(expr: Expr) -> OperatorPoly:
    if isinstance(expr, Sum):
        out = ZERO
        for t in expr:
            out = out + _fold(t)
        return out
    if isinstance(expr, Product):
        out = OperatorPoly.scalar(1)
        for f in expr:
            out = multiply(out, _fold(f))
        return out
    return OperatorPoly.coerce(expr)
