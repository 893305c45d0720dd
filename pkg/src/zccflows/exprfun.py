"""Expression functions ``g^n -> g`` and the two Lie brackets on them.

Expressions are small immutable trees built from projections, the plus
projection of a splitting, commutators, linear combinations and constants.
They evaluate on arrays (optionally batched) and on dual numbers, and they
carry exact directional derivatives.

Two brackets live on these functions:

* the pointwise bracket ``[f, g](x) = [f(x), g(x)]``, which stays inside
  the expression grammar, and
* the primed bracket ``[f, g]'(x) = dg_x([f(x), x]) - df_x([g(x), x]) + [g(x), f(x)]``,
  where ``[f(x), x]`` is the tuple ``([f(x), x_1], ..., [f(x), x_n])``.  This
  one needs derivatives of its arguments, so it returns a
  :class:`FunctionValue` rather than an expression.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .dual import jvp
from .liealg import SKEW_UPPER, LieAlgebraError, MatrixAlgebra, Splitting, bracket


class ArityError(LieAlgebraError):
    pass


class ExprFun:
    """Base class of expression nodes; ``arity`` is the number of arguments."""

    arity: int

    def __call__(self, x, splitting: Splitting | None = None):
        return evaluate(self, x, splitting)

    def __add__(self, other):
        return LinComb(((1.0, self), (1.0, other)))

    def __sub__(self, other):
        return LinComb(((1.0, self), (-1.0, other)))

    def __rmul__(self, c):
        return LinComb(((float(c), self),))

    def __neg__(self):
        return LinComb(((-1.0, self),))


@dataclass(frozen=True)
class Proj(ExprFun):
    """The projection ``p_index`` (1-based) on ``g^arity``."""

    index: int
    arity: int

    def __post_init__(self):
        if not 1 <= self.index <= self.arity:
            raise ArityError(f"projection index {self.index} outside 1..{self.arity}")

    def __repr__(self):
        return f"p{self.index}"


@dataclass(frozen=True)
class PlusPart(ExprFun):
    child: ExprFun

    @property
    def arity(self):
        return self.child.arity

    def __repr__(self):
        return f"({self.child!r})+"


@dataclass(frozen=True)
class Bracket(ExprFun):
    left: ExprFun
    right: ExprFun

    def __post_init__(self):
        if self.left.arity != self.right.arity:
            raise ArityError(f"bracket of arity {self.left.arity} and {self.right.arity}")

    @property
    def arity(self):
        return self.left.arity

    def __repr__(self):
        return f"[{self.left!r}, {self.right!r}]"


@dataclass(frozen=True)
class LinComb(ExprFun):
    terms: tuple  # of (coefficient, ExprFun)

    def __post_init__(self):
        if not self.terms:
            raise ArityError("empty linear combination")
        arities = {child.arity for _, child in self.terms}
        if len(arities) != 1:
            raise ArityError(f"linear combination mixes arities {sorted(arities)}")

    @property
    def arity(self):
        return self.terms[0][1].arity

    def __repr__(self):
        return " + ".join(f"{c:g}*{f!r}" for c, f in self.terms)


@dataclass(frozen=True, eq=False)
class ConstElem(ExprFun):
    value: np.ndarray
    arity: int

    def __repr__(self):
        return "C"


def proj(index: int, arity: int) -> Proj:
    return Proj(index, arity)


def projections(arity: int) -> list[Proj]:
    return [Proj(i, arity) for i in range(1, arity + 1)]


# -- evaluation ---------------------------------------------------------------


def _check_args(f: ExprFun, x: Sequence):
    if len(x) != f.arity:
        raise ArityError(f"function of arity {f.arity} applied to {len(x)} arguments")


def evaluate(f: ExprFun, x: Sequence, splitting: Splitting | None = None):
    """Evaluate ``f`` at ``x = (x_1, ..., x_n)``.

    ``x_i`` may be arrays of shape ``(..., n, n)`` or dual numbers.
    """
    _check_args(f, x)
    split = SKEW_UPPER if splitting is None else splitting
    return _eval(f, x, split)


def _eval(f, x, split):
    if isinstance(f, Proj):
        return x[f.index - 1]
    if isinstance(f, PlusPart):
        return split.plus(_eval(f.child, x, split))
    if isinstance(f, Bracket):
        return bracket(_eval(f.left, x, split), _eval(f.right, x, split))
    if isinstance(f, LinComb):
        return sum(c * _eval(child, x, split) for c, child in f.terms)
    if isinstance(f, ConstElem):
        return f.value
    raise TypeError(f"not an expression node: {f!r}")


def dir_deriv(f: ExprFun, x: Sequence, v: Sequence, splitting: Splitting | None = None):
    """Exact directional derivative ``df_x(v)`` by structural recursion."""
    _check_args(f, x)
    if len(v) != len(x):
        raise ArityError(f"direction has {len(v)} slots, point has {len(x)}")
    split = SKEW_UPPER if splitting is None else splitting
    return _eval_with_deriv(f, x, v, split)[1]


def _eval_with_deriv(f, x, v, split):
    if isinstance(f, Proj):
        return x[f.index - 1], v[f.index - 1]
    if isinstance(f, PlusPart):
        val, der = _eval_with_deriv(f.child, x, v, split)
        return split.plus(val), split.plus(der)
    if isinstance(f, Bracket):
        a, da = _eval_with_deriv(f.left, x, v, split)
        b, db = _eval_with_deriv(f.right, x, v, split)
        return bracket(a, b), bracket(da, b) + bracket(a, db)
    if isinstance(f, LinComb):
        pairs = [(c, _eval_with_deriv(child, x, v, split)) for c, child in f.terms]
        return sum(c * p[0] for c, p in pairs), sum(c * p[1] for c, p in pairs)
    if isinstance(f, ConstElem):
        return f.value, np.zeros_like(f.value)
    raise TypeError(f"not an expression node: {f!r}")


def substitute(f: ExprFun, args: Sequence[ExprFun]) -> ExprFun:
    """Compose: replace each projection ``p_i`` in ``f`` by ``args[i-1]``."""
    _check_args(f, args)
    arity = args[0].arity if args else 0

    def go(node):
        if isinstance(node, Proj):
            return args[node.index - 1]
        if isinstance(node, PlusPart):
            return PlusPart(go(node.child))
        if isinstance(node, Bracket):
            return Bracket(go(node.left), go(node.right))
        if isinstance(node, LinComb):
            return LinComb(tuple((c, go(child)) for c, child in node.terms))
        if isinstance(node, ConstElem):
            return ConstElem(node.value, arity)
        raise TypeError(f"not an expression node: {node!r}")

    return go(f)


# -- function values and brackets ---------------------------------------------


class FunctionValue:
    """A callable ``g^n -> g`` of known arity.

    Wraps either an expression (bound to a splitting) or an arbitrary
    callable taking the argument list.  The callable must accept dual
    numbers if it is going to be differentiated.
    """

    def __init__(self, fn: Callable[[Sequence], object], arity: int, label: str = "f"):
        self.fn = fn
        self.arity = arity
        self.label = label

    def __call__(self, x: Sequence):
        if len(x) != self.arity:
            raise ArityError(f"{self.label} has arity {self.arity}, got {len(x)} arguments")
        return self.fn(x)

    def deriv(self, x: Sequence, v: Sequence):
        return jvp(self, x, v)

    def __repr__(self):
        return f"FunctionValue({self.label}, arity={self.arity})"


def as_function(f, splitting: Splitting | None = None) -> FunctionValue:
    if isinstance(f, FunctionValue):
        return f
    if isinstance(f, ExprFun):
        split = SKEW_UPPER if splitting is None else splitting
        return FunctionValue(lambda x: _eval(f, x, split), f.arity, repr(f))
    raise TypeError(f"expected ExprFun or FunctionValue, got {type(f).__name__}")


def pointwise_bracket(f: ExprFun, g: ExprFun) -> ExprFun:
    return Bracket(f, g)


def lax_directions(fx, x: Sequence) -> list:
    """The tuple ``[f(x), x] = ([f(x), x_1], ..., [f(x), x_n])``."""
    return [bracket(fx, xi) for xi in x]


def primed_bracket(f, g, splitting: Splitting | None = None) -> FunctionValue:
    """``x -> dg_x([f(x), x]) - df_x([g(x), x]) + [g(x), f(x)]``."""
    F = as_function(f, splitting)
    G = as_function(g, splitting)
    if F.arity != G.arity:
        raise ArityError(f"primed bracket of arity {F.arity} and {G.arity}")

    def value(x):
        fx = F(x)
        gx = G(x)
        return (
            jvp(G, x, lax_directions(fx, x))
            - jvp(F, x, lax_directions(gx, x))
            + bracket(gx, fx)
        )

    return FunctionValue(value, F.arity, f"[{F.label}, {G.label}]'")


class FnAlgebra(enum.Enum):
    POINTWISE = "pointwise"
    PRIMED = "primed"


def word_in_algebra(tree, generators: Sequence, mode: FnAlgebra | str = FnAlgebra.POINTWISE,
                    splitting: Splitting | None = None) -> FunctionValue:
    """Evaluate a free Lie algebra word on function generators.

    In pointwise mode the word is built as an expression (generators must be
    :class:`ExprFun`); in primed mode each node is a primed bracket.
    """
    from .freelie import LyndonTree

    mode = FnAlgebra(mode)
    if not isinstance(tree, LyndonTree):
        raise TypeError("word_in_algebra expects a LyndonTree")
    if len(generators) < tree.max_letter:
        raise ArityError(f"word uses letter {tree.max_letter} but only {len(generators)} generators given")
    arities = {g.arity for g in generators}
    if len(arities) != 1:
        raise ArityError(f"generators have mixed arities {sorted(arities)}")

    if mode is FnAlgebra.POINTWISE:
        def build(node):
            if node.is_leaf:
                return generators[node.letter - 1]
            return pointwise_bracket(build(node.left), build(node.right))

        return as_function(build(tree), splitting)

    def build_primed(node):
        if node.is_leaf:
            return as_function(generators[node.letter - 1], splitting)
        return primed_bracket(build_primed(node.left), build_primed(node.right), splitting)

    return build_primed(tree)


def theorem_residual(tree, points: Sequence, splitting: Splitting | None = None) -> np.ndarray:
    """Frobenius norm of ``w(p)_+ (x) - w(p_+)'(x)`` at (batched) ``points``.

    The left side is pointwise matrix evaluation followed by the plus
    projection; the right side is the primed word on the projected
    projections.  They agree whenever both halves of the splitting are
    subalgebras.
    """
    split = SKEW_UPPER if splitting is None else splitting
    n = len(points)
    ps = projections(n)
    lhs = split.plus(word_in_algebra(tree, ps, FnAlgebra.POINTWISE, split)(points))
    rhs = word_in_algebra(tree, [PlusPart(p) for p in ps], FnAlgebra.PRIMED, split)(points)
    diff = np.asarray(lhs) - np.asarray(rhs)
    return np.sqrt(np.sum(diff * diff, axis=(-2, -1)))


# -- random expressions and serialization -------------------------------------


def random_expr(rng: np.random.Generator, arity: int, depth: int,
                algebra: MatrixAlgebra | None = None) -> ExprFun:
    """A random expression of depth at most ``depth`` (leaves have depth 0)."""
    algebra = algebra or MatrixAlgebra()
    if depth <= 0:
        if rng.random() < 0.85:
            return Proj(int(rng.integers(1, arity + 1)), arity)
        return ConstElem(algebra.random(rng), arity)
    kind = rng.choice(["bracket", "plus", "lincomb", "leaf"], p=[0.45, 0.2, 0.25, 0.1])
    if kind == "leaf":
        return random_expr(rng, arity, 0, algebra)
    if kind == "plus":
        return PlusPart(random_expr(rng, arity, depth - 1, algebra))
    if kind == "bracket":
        return Bracket(random_expr(rng, arity, depth - 1, algebra), random_expr(rng, arity, depth - 1, algebra))
    k = int(rng.integers(1, 4))
    return LinComb(tuple(
        (float(rng.uniform(-2, 2)), random_expr(rng, arity, depth - 1, algebra)) for _ in range(k)
    ))


def depth(f: ExprFun) -> int:
    if isinstance(f, (Proj, ConstElem)):
        return 0
    if isinstance(f, PlusPart):
        return 1 + depth(f.child)
    if isinstance(f, Bracket):
        return 1 + max(depth(f.left), depth(f.right))
    return 1 + max(depth(c) for _, c in f.terms)


def to_json(f: ExprFun) -> dict:
    if isinstance(f, Proj):
        return {"kind": "proj", "index": f.index, "arity": f.arity}
    if isinstance(f, PlusPart):
        return {"kind": "plus", "child": to_json(f.child)}
    if isinstance(f, Bracket):
        return {"kind": "bracket", "left": to_json(f.left), "right": to_json(f.right)}
    if isinstance(f, LinComb):
        return {"kind": "lincomb", "terms": [[c, to_json(child)] for c, child in f.terms]}
    if isinstance(f, ConstElem):
        return {"kind": "const", "value": np.asarray(f.value).tolist(), "arity": f.arity}
    raise TypeError(f"not an expression node: {f!r}")


def from_json(obj: dict) -> ExprFun:
    try:
        kind = obj["kind"]
        if kind == "proj":
            return Proj(int(obj["index"]), int(obj["arity"]))
        if kind == "plus":
            return PlusPart(from_json(obj["child"]))
        if kind == "bracket":
            return Bracket(from_json(obj["left"]), from_json(obj["right"]))
        if kind == "lincomb":
            return LinComb(tuple((float(c), from_json(child)) for c, child in obj["terms"]))
        if kind == "const":
            return ConstElem(np.asarray(obj["value"], dtype=float), int(obj["arity"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed expression JSON: {obj!r}") from exc
    raise ValueError(f"unknown expression kind {kind!r}")
