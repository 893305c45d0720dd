"""Tagged forward-mode dual numbers over matrices.

A :class:`Dual` is ``primal + eps_tag * tangent`` where ``eps_tag**2 = 0``.
Primal and tangent may themselves be duals carrying older tags, which is
how nested directional derivatives (a derivative of a primed bracket that
already contains derivatives) stay exact.  Every fresh derivative gets a
new tag, newer tags always sit outermost, and tangents are extracted by
tag, so distinct perturbations never get confused.

Only the operations the Lie machinery needs are supported: ``+``, ``-``,
scalar ``*``, matrix ``@`` and linear maps via :meth:`Dual.apply_linear`.
"""

from __future__ import annotations

import itertools
from typing import Callable, Sequence

import numpy as np

_tags = itertools.count(1)


def new_tag() -> int:
    return next(_tags)


def _tag(x) -> int:
    return x.tag if isinstance(x, Dual) else 0


def _parts(x, tag):
    if isinstance(x, Dual) and x.tag == tag:
        return x.primal, x.tangent
    return x, None


def _add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def _lin(f, x):
    if x is None:
        return None
    if isinstance(x, Dual):
        return x.apply_linear(f)
    return f(x)


class Dual:
    __slots__ = ("tag", "primal", "tangent")
    # ndarray (op) Dual must defer to the reflected Dual methods
    __array_ufunc__ = None

    def __init__(self, tag: int, primal, tangent=None):
        self.tag = tag
        self.primal = primal
        self.tangent = tangent

    def __repr__(self):
        return f"Dual(tag={self.tag}, primal={self.primal!r}, tangent={self.tangent!r})"

    def _binary(self, other, op):
        t = max(_tag(self), _tag(other))
        return op(t, *_parts(self, t), *_parts(other, t))

    def __add__(self, other):
        if isinstance(other, (int, float)) and other == 0:
            return self
        return self._binary(other, lambda t, a, da, b, db: Dual(t, a + b, _add(da, db)))

    __radd__ = __add__

    def __neg__(self):
        return Dual(self.tag, -self.primal, None if self.tangent is None else -self.tangent)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        if isinstance(c, Dual):
            raise TypeError("Dual * Dual is not a Lie-algebra operation; use @")
        return Dual(self.tag, c * self.primal, None if self.tangent is None else c * self.tangent)

    __rmul__ = __mul__

    def __matmul__(self, other):
        def op(t, a, da, b, db):
            d = None
            if db is not None:
                d = a @ db
            if da is not None:
                d = _add(d, da @ b)
            return Dual(t, a @ b, d)

        return self._binary(other, op)

    def __rmatmul__(self, other):
        t = self.tag
        return Dual(t, other @ self.primal, None if self.tangent is None else other @ self.tangent)

    def apply_linear(self, f: Callable):
        """Push a linear map through both parts."""
        return Dual(self.tag, _lin(f, self.primal), _lin(f, self.tangent))

    @property
    def shape(self):
        return np.shape(primal_array(self))


def primal_array(x):
    """Strip every perturbation and return the underlying array."""
    while isinstance(x, Dual):
        x = x.primal
    return x


def _zeros_like(x):
    return np.zeros_like(primal_array(x), dtype=float)


def tangent(x, tag: int):
    """Coefficient of ``eps_tag`` in ``x`` (zero if ``x`` does not depend on it)."""
    if not isinstance(x, Dual):
        return _zeros_like(x)
    if x.tag == tag:
        return _zeros_like(x.primal) if x.tangent is None else x.tangent
    if x.tag < tag:
        # newer tags are always outermost, so tag cannot occur inside
        return _zeros_like(x)
    inner_t = None if x.tangent is None else tangent(x.tangent, tag)
    return Dual(x.tag, tangent(x.primal, tag), inner_t)


def jvp(fn: Callable[[Sequence], object], x: Sequence, v: Sequence):
    """Directional derivative ``d fn_x (v)`` by a fresh dual perturbation.

    ``x`` and ``v`` may themselves contain duals of older tags.
    """
    if len(x) != len(v):
        raise ValueError(f"point has {len(x)} slots but direction has {len(v)}")
    t = new_tag()
    out = fn([Dual(t, xi, vi) for xi, vi in zip(x, v)])
    return tangent(out, t)
