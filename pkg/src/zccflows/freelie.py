"""Lyndon-word basis of the free Lie algebra and word evaluation.

Letters are 1-based integers.  A :class:`LyndonTree` is the standard
bracketing of a Lyndon word: a single letter is a leaf, and a longer word
``w = uv`` is split with ``v`` the longest proper Lyndon suffix, giving the
node ``[tree(u), tree(v)]``.  Trees of degree two and up span the
commutator ideal.

Evaluation goes through a :class:`BracketContext`, so the same word can be
evaluated with matrix commutators, the pointwise or primed function
brackets, or the numerical bracket of parametrized vector fields.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np


class FreeLieError(ValueError):
    pass


@dataclass(frozen=True)
class LyndonTree:
    word: tuple
    left: "LyndonTree | None" = None
    right: "LyndonTree | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def letter(self) -> int:
        if not self.is_leaf:
            raise FreeLieError("only leaves have a letter")
        return self.word[0]

    @property
    def degree(self) -> int:
        return len(self.word)

    @property
    def max_letter(self) -> int:
        return max(self.word)

    def __repr__(self):
        if self.is_leaf:
            return f"a{self.letter}"
        return f"[{self.left!r}, {self.right!r}]"

    def to_json(self):
        if self.is_leaf:
            return str(self.letter)
        return [self.left.to_json(), self.right.to_json()]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def leaf(letter: int) -> LyndonTree:
    return LyndonTree((int(letter),))


def node(left: LyndonTree, right: LyndonTree) -> LyndonTree:
    return LyndonTree(left.word + right.word, left, right)


def tree_from_json(obj) -> LyndonTree:
    """Parse the nested-list form, e.g. ``["1", ["1", "2"]]``.

    The result is a bracketing, not necessarily a standard Lyndon one.
    """
    if isinstance(obj, (str, int)) and not isinstance(obj, bool):
        try:
            letter = int(obj)
        except ValueError:
            raise FreeLieError(f"not a letter: {obj!r}") from None
        if letter < 1:
            raise FreeLieError(f"letters are 1-based, got {letter}")
        return leaf(letter)
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        return node(tree_from_json(obj[0]), tree_from_json(obj[1]))
    raise FreeLieError(f"malformed tree JSON: {obj!r}")


# -- Lyndon words -------------------------------------------------------------


def is_lyndon(word: Sequence[int]) -> bool:
    """Strictly smaller than each of its proper rotations."""
    w = tuple(word)
    return len(w) > 0 and all(w < w[i:] + w[:i] for i in range(1, len(w)))


def lyndon_words(n_letters: int, max_degree: int) -> list[tuple]:
    """All Lyndon words up to ``max_degree`` in lexicographic order (Duval's generator)."""
    if n_letters < 1:
        raise FreeLieError("need at least one letter")
    if max_degree < 1:
        raise FreeLieError("max_degree must be at least 1")
    out = []
    w = [0]
    while w:
        out.append(tuple(c + 1 for c in w))
        m = len(w)
        while len(w) < max_degree:
            w.append(w[len(w) - m])
        while w and w[-1] == n_letters - 1:
            w.pop()
        if w:
            w[-1] += 1
    return out


def standard_factorization(word: tuple) -> tuple[tuple, tuple]:
    """Split a Lyndon word ``w = uv`` with ``v`` its longest proper Lyndon suffix."""
    for i in range(1, len(word)):
        if is_lyndon(word[i:]):
            return word[:i], word[i:]
    raise FreeLieError(f"word {word} of length < 2 has no standard factorization")


@functools.lru_cache(maxsize=None)
def standard_bracketing(word: tuple) -> LyndonTree:
    if not is_lyndon(word):
        raise FreeLieError(f"{word} is not a Lyndon word")
    if len(word) == 1:
        return leaf(word[0])
    u, v = standard_factorization(word)
    return node(standard_bracketing(u), standard_bracketing(v))


def _mobius(n: int) -> int:
    result, p, m = 1, 2, n
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


def witt_dimension(n_letters: int, degree: int) -> int:
    """Dimension of the degree-``degree`` part of the free Lie algebra on ``n_letters``."""
    total = sum(
        _mobius(e) * n_letters ** (degree // e) for e in range(1, degree + 1) if degree % e == 0
    )
    return total // degree


def lyndon_basis(n_letters: int, max_degree: int) -> list[LyndonTree]:
    """Lyndon trees of degree at most ``max_degree``, sorted by (degree, word)."""
    words = sorted(lyndon_words(n_letters, max_degree), key=lambda w: (len(w), w))
    return [standard_bracketing(w) for w in words]


def commutator_ideal_basis(n_letters: int, max_degree: int) -> list[LyndonTree]:
    return [t for t in lyndon_basis(n_letters, max_degree) if t.degree >= 2]


def right_nested(word: Sequence[int]) -> LyndonTree:
    """``[b1, [b2, [..., [b_{k-1}, b_k]]]]`` for the word ``b1 b2 ... bk``."""
    word = tuple(int(c) for c in word)
    if not word:
        raise FreeLieError("empty word")
    t = leaf(word[-1])
    for c in reversed(word[:-1]):
        t = node(leaf(c), t)
    return t


def right_nested_monomials(n_letters: int, max_degree: int, min_degree: int = 2) -> list[LyndonTree]:
    """All right-nested monomials on every word of the given degree range."""
    out = []
    for d in range(min_degree, max_degree + 1):
        for w in itertools.product(range(1, n_letters + 1), repeat=d):
            if len(set(w[-2:])) == 2:  # [b, b] = 0 innermost
                out.append(right_nested(w))
    return out


# -- evaluation ---------------------------------------------------------------


@dataclass(frozen=True)
class BracketContext:
    """How to bracket, add and scale values of some Lie algebra."""

    bracket: Callable[[Any, Any], Any]
    add: Callable[[Any, Any], Any] = lambda x, y: x + y
    scale: Callable[[float, Any], Any] = lambda c, x: c * x


def matrix_context() -> BracketContext:
    return BracketContext(bracket=lambda X, Y: X @ Y - Y @ X)


def evaluate(tree: LyndonTree, points: Sequence, ctx: BracketContext | None = None):
    """Substitute ``points[i-1]`` for letter ``i`` and bracket through ``ctx``."""
    ctx = ctx or matrix_context()
    if tree.max_letter > len(points):
        raise FreeLieError(f"word uses letter {tree.max_letter} but {len(points)} points given")
    return _evaluate(tree, points, ctx)


def _evaluate(tree, points, ctx):
    if tree.is_leaf:
        return points[tree.letter - 1]
    return ctx.bracket(_evaluate(tree.left, points, ctx), _evaluate(tree.right, points, ctx))


def check_bilinear(ctx: BracketContext, x, y, z, c: float = 0.37, tol: float = 1e-10) -> bool:
    """Smoke test of bilinearity on probe inputs (left slot and scaling)."""
    lhs = ctx.bracket(ctx.add(x, ctx.scale(c, z)), y)
    rhs = ctx.add(ctx.bracket(x, y), ctx.scale(c, ctx.bracket(z, y)))
    diff = np.asarray(lhs) - np.asarray(rhs)
    return float(np.max(np.abs(diff), initial=0.0)) <= tol * (1.0 + float(np.max(np.abs(rhs), initial=0.0)))
