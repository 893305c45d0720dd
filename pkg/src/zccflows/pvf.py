"""Parametrized vector fields on a linear manifold.

A pvf of order ``n`` takes ``n`` parameter points and a base point and
returns a tangent vector at the base point.  On a vector space (a Lie
algebra, or the real line) tangent vectors are just elements of the space,
so a pvf is a plain function ``M^(n+1) -> M``.

Its lift is the honest vector field on ``M^(n+1)`` whose ``i``-th
component evaluates the pvf with the base point replaced by the ``i``-th
coordinate.  The pvf bracket is the vector-field commutator of lifts,
read off in the last component; here it is computed numerically with
central differences and serves as an independent check of the analytic
brackets in :mod:`zccflows.exprfun`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exprfun import ExprFun, FunctionValue, Proj, as_function, substitute
from .liealg import LieAlgebraError, Splitting, bracket


class PvfError(LieAlgebraError):
    pass


@dataclass(frozen=True)
class Pvf:
    """``field(params, point)`` with ``len(params) == order``.

    ``lax_function`` is set by :func:`lax` so that callers can take the
    analytic route for Lax-type fields.
    """

    order: int
    field: Callable[[Sequence, object], object]
    label: str = "xi"
    lax_function: ExprFun | FunctionValue | None = None
    splitting: Splitting | None = None

    def __call__(self, params: Sequence, point):
        if len(params) != self.order:
            raise PvfError(f"{self.label} has order {self.order}, got {len(params)} parameters")
        return self.field(list(params), point)

    def at(self, a: Sequence):
        """Evaluate on a flat tuple ``(a_1, ..., a_order, y)``."""
        return self(a[:-1], a[-1])


@dataclass(frozen=True)
class LiftedField:
    """The vector field on ``M^(order+1)`` obtained from a pvf."""

    order: int
    components: Callable[[Sequence], list]
    source: Pvf | None = field(default=None, compare=False)

    def __call__(self, a: Sequence) -> list:
        self._check(a)
        return self.components(list(a))

    def component(self, a: Sequence, i: int):
        """The ``i``-th component alone (1-based), without computing the others."""
        self._check(a)
        if self.source is not None:
            return self.source.at(tau(a, i))
        return self.components(list(a))[i - 1]

    def _check(self, a):
        if len(a) != self.order + 1:
            raise PvfError(f"lifted field of order {self.order} needs {self.order + 1} points, got {len(a)}")


def tau(a: Sequence, i: int) -> list:
    """Keep the first ``len(a) - 1`` coordinates and put ``a_i`` (1-based) last."""
    a = list(a)
    return a[:-1] + [a[i - 1]]


def lift(xi: Pvf) -> LiftedField:
    def components(a):
        return [xi.at(tau(a, i)) for i in range(1, len(a) + 1)]

    return LiftedField(xi.order, components, xi)


def project(eta: LiftedField) -> Pvf:
    """Left inverse of :func:`lift`: keep only the last component."""
    def field_(params, point):
        return eta.component(list(params) + [point], eta.order + 1)

    return Pvf(eta.order, field_, label="pi(eta)")


def _axpy(a: Sequence, h: float, v: Sequence) -> list:
    return [ai + h * vi for ai, vi in zip(a, v)]


def _directional_fd(fn: Callable[[list], object], a: list, v: list, h: float, richardson: bool):
    d1 = (np.asarray(fn(_axpy(a, h, v))) - np.asarray(fn(_axpy(a, -h, v)))) / (2.0 * h)
    if not richardson:
        return d1
    h2 = 0.5 * h
    d2 = (np.asarray(fn(_axpy(a, h2, v))) - np.asarray(fn(_axpy(a, -h2, v)))) / (2.0 * h2)
    return (4.0 * d2 - d1) / 3.0


def pvf_bracket_numeric(xi: Pvf, psi: Pvf, fd_step: float = 1e-5, richardson: bool = False) -> Pvf:
    """Numerical pvf bracket ``[xi, psi]``.

    The last component of ``[lift(xi), lift(psi)](a)`` is
    ``D psi(a)[lift(xi)(a)] - D xi(a)[lift(psi)(a)]``, where ``D`` is the
    derivative in all ``order + 1`` slots.  Both directional derivatives
    are central differences with step ``fd_step``.
    """
    if xi.order != psi.order:
        raise PvfError(f"cannot bracket pvfs of order {xi.order} and {psi.order}")
    if not fd_step > 0:
        raise PvfError("fd_step must be positive")
    lx, lp = lift(xi), lift(psi)

    def field_(params, point):
        a = list(params) + [point]
        d_psi = _directional_fd(psi.at, a, lx(a), fd_step, richardson)
        d_xi = _directional_fd(xi.at, a, lp(a), fd_step, richardson)
        out = d_psi - d_xi
        if not np.all(np.isfinite(out)):
            raise PvfError("finite-difference bracket produced non-finite values")
        return out

    return Pvf(xi.order, field_, label=f"[{xi.label}, {psi.label}]")


def lax(f, splitting: Splitting | None = None) -> Pvf:
    """The Lax-type pvf ``(x, y) -> [f(x), y]``."""
    F = as_function(f, splitting)

    def field_(params, point):
        return bracket(F(params), point)

    return Pvf(F.arity, field_, label=f"xi_{F.label}", lax_function=f, splitting=splitting)


def promote(xi: Pvf, slot: int) -> Pvf:
    """Order-1 pvf to order 2: slot 1 gives ``xi(a, c)``, slot 2 gives ``xi(b, c)``."""
    if xi.order != 1:
        raise PvfError(f"only order-1 pvfs can be promoted, got order {xi.order}")
    if slot not in (1, 2):
        raise PvfError("slot must be 1 or 2")

    def field_(params, point):
        return xi([params[slot - 1]], point)

    lax_fn = None
    if isinstance(xi.lax_function, ExprFun):
        lax_fn = substitute(xi.lax_function, [Proj(slot, 2)])
    return Pvf(2, field_, label=f"{xi.label}^{slot}", lax_function=lax_fn, splitting=xi.splitting)


def pvf_context(fd_step: float = 1e-5, richardson: bool = False):
    """Bracket context so free-Lie words can be evaluated on pvfs."""
    from .freelie import BracketContext

    def add(x, y):
        return Pvf(x.order, lambda p, q: np.asarray(x(p, q)) + np.asarray(y(p, q)), label=f"{x.label}+{y.label}")

    def scale(c, x):
        return Pvf(x.order, lambda p, q: c * np.asarray(x(p, q)), label=f"{c:g}{x.label}")

    return BracketContext(
        bracket=lambda x, y: pvf_bracket_numeric(x, y, fd_step, richardson),
        add=add,
        scale=scale,
    )
