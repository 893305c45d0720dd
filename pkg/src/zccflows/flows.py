"""Flows of lifted pvfs, the dressing group ODE and zero-curvature checks."""

from __future__ import annotations

import csv
import time as _time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import freelie
from .exprfun import FnAlgebra, PlusPart, Proj, as_function, substitute, word_in_algebra
from .integrate import IntegrationError, IntegratorConfig, integrate
from .liealg import SKEW_UPPER, bracket, check_group, frobenius, get_splitting, renormalize_det
from .pvf import LiftedField, Pvf, PvfError, lift, promote, pvf_context

SCHEMA = "zccflows/1"

DEFAULT_CONFIG = IntegratorConfig()

# nested numerical words: polynomial fields make a wide Richardson step accurate
WORD_FD_STEP = 1e-2


@dataclass
class FlowReport:
    """Outcome of a zcc or word-criterion experiment.

    ``passed`` is exactly ``max_defect <= tolerance``.
    """

    kind: str
    inputs: dict
    grid: list
    defects: list
    max_defect: float
    tolerance: float
    failed: bool = False
    message: str = ""
    extra: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return (not self.failed) and self.max_defect <= self.tolerance

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "kind": self.kind,
            "inputs": self.inputs,
            "grid": self.grid,
            "defects": self.defects,
            "max_defect": self.max_defect,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "failed": self.failed,
            "message": self.message,
            "extra": self.extra,
            "wall_time": self.wall_time,
        }


def _stack(states: Sequence) -> tuple[np.ndarray, tuple]:
    arrs = [np.asarray(s, dtype=float) for s in states]
    shape = np.broadcast_shapes(*(a.shape for a in arrs))
    return np.stack([np.broadcast_to(a, shape) for a in arrs]), shape


def flow(field_: LiftedField, state0: Sequence, time: float, cfg: IntegratorConfig = DEFAULT_CONFIG,
         record: bool = False):
    """Integrate ``dX/dt = field(X)`` from ``state0`` for ``time``.

    Returns the list of final components, or ``(final, times, states)``
    when ``record`` is set.  Components are broadcast to a common shape, so
    batched probes may share unbatched parameters.
    """
    if len(state0) != field_.order + 1:
        raise PvfError(f"field of order {field_.order} needs {field_.order + 1} state components, got {len(state0)}")
    y0, _ = _stack(state0)

    def rhs(_t, y):
        return _stack(field_(list(y)))[0]

    y1, times, states = integrate(rhs, y0, 0.0, float(time), cfg, record=record)
    out = list(y1)
    if record:
        return out, times, states
    return out


def dressing_solve(coefficient_path: Callable[[float], np.ndarray], time: float, initial=None,
                   cfg: IntegratorConfig = DEFAULT_CONFIG, record: bool = False):
    """Solve ``dsigma/ds = A(s) sigma`` for ``sigma(time)``.

    With ``cfg.group_projection`` each accepted step is rescaled to unit
    determinant.
    """
    A0 = np.asarray(coefficient_path(0.0), dtype=float)
    n = A0.shape[-1]
    g0 = np.eye(n) if initial is None else check_group(initial, n)

    def rhs(s, g):
        return np.asarray(coefficient_path(s), dtype=float) @ g

    post = renormalize_det if cfg.group_projection else None
    g1, times, states = integrate(rhs, g0, 0.0, float(time), cfg, post_step=post, record=record)
    if cfg.group_projection:
        check_group(g1)
    if record:
        return g1, times, states
    return g1


def dressed_flow(xi: Pvf, state0: Sequence, time: float, g0=None,
                 cfg: IntegratorConfig = DEFAULT_CONFIG):
    """Flow a Lax-type pvf together with its dressing element.

    For ``xi(x, y) = [f(x), y]`` the group element obeys
    ``dg/dt = f(x(t)) g``, so every component satisfies
    ``y(t) = g(t) g0^{-1} y(0) g0 g(t)^{-1}``.  Returns ``(state, g)``.
    """
    if xi.lax_function is None:
        raise PvfError("dressed_flow needs a Lax-type pvf (built with lax())")
    F = as_function(xi.lax_function, xi.splitting)
    X = lift(xi)
    k = xi.order + 1
    state, _ = _stack(state0)
    n = state.shape[-1]
    g_init = np.eye(n) if g0 is None else check_group(g0, n)

    def rhs(_t, y):
        comps = list(y[:k])
        g = y[k]
        return np.concatenate([_stack(X(comps))[0], (F(comps[:-1]) @ g)[None]])

    def project_group(y):
        y = y.copy()
        y[k] = renormalize_det(y[k])
        return y

    post = project_group if cfg.group_projection else None

    y1, _, _ = integrate(rhs, np.concatenate([state, g_init[None]]), 0.0, float(time), cfg, post_step=post)
    return list(y1[:k]), y1[k]


def _promoted_lifts(xi: Pvf):
    return lift(promote(xi, 1)), lift(promote(xi, 2))


def zcc_endpoints(xi: Pvf, a, b, y, s: float, t: float, cfg: IntegratorConfig = DEFAULT_CONFIG):
    """Both compositions of the two flows from ``(a, b, y)``.

    Returns ``(phi1_s(phi2_t(.)), phi2_t(phi1_s(.)))`` as lists of three
    components.
    """
    X1, X2 = _promoted_lifts(xi)
    state = [a, b, y]
    first = flow(X1, flow(X2, state, t, cfg), s, cfg)
    second = flow(X2, flow(X1, state, s, cfg), t, cfg)
    return first, second


def zcc_check(xi: Pvf, a, b, probes: Sequence, s: float, t: float,
              cfg: IntegratorConfig = DEFAULT_CONFIG, tolerance: float = 1e-6) -> FlowReport:
    """Compare the two orders of the flows at every probe; all three components count."""
    if len(probes) == 0:
        raise ValueError("zcc_check needs at least one probe")
    started = _time.perf_counter()
    Y = np.stack([np.asarray(p, dtype=float) for p in probes])
    inputs = {
        "xi": xi.label,
        "a": np.asarray(a).tolist(),
        "b": np.asarray(b).tolist(),
        "probes": Y.tolist(),
        "s": s,
        "t": t,
        "integrator": cfg.to_dict(),
    }
    try:
        first, second = zcc_endpoints(xi, a, b, Y, s, t, cfg)
    except IntegrationError as exc:
        return FlowReport("zcc", inputs, [[s, t]], [], float("inf"), tolerance, failed=True,
                          message=str(exc), wall_time=_time.perf_counter() - started)
    per_probe = np.max(np.stack([frobenius(p - q) for p, q in zip(first, second)]), axis=0)
    per_probe = np.atleast_1d(per_probe)
    defects = [float(d) for d in per_probe]
    return FlowReport("zcc", inputs, [[s, t]], defects, max(defects), tolerance,
                      wall_time=_time.perf_counter() - started)


def _lax_generators(xi: Pvf):
    f = xi.lax_function
    if f is None or getattr(f, "arity", None) != 1:
        return None
    return [substitute(f, [Proj(1, 2)]), substitute(f, [Proj(2, 2)])]


def word_criterion_check(xi: Pvf, a, b, probes: Sequence, max_degree: int = 3,
                         tolerance: float = 1e-5, fd_step: float = WORD_FD_STEP,
                         richardson: bool = True) -> FlowReport:
    """Evaluate every commutator word ``w(xi^1, xi^2)`` at ``(a, b, z)``.

    The numerical route nests finite-difference pvf brackets.  For Lax-type
    ``xi`` the analytic route uses ``w(xi^1, xi^2) = xi_{w(f1, f2)'}``, and for
    ``xi(x, y) = [x_+, y]`` additionally the reduction ``[w(a, b)_+, z]``.
    ``max_defect`` is the largest numerical word magnitude; zcc holds iff
    every word vanishes.
    """
    if max_degree < 2:
        raise ValueError("max_degree must be at least 2")
    if len(probes) == 0:
        raise ValueError("word_criterion_check needs at least one probe")
    started = _time.perf_counter()
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    Z = [np.asarray(z, dtype=float) for z in probes]
    split = get_splitting(xi.splitting or SKEW_UPPER)
    xi1, xi2 = promote(xi, 1), promote(xi, 2)
    ctx = pvf_context(fd_step, richardson)
    gens = _lax_generators(xi)
    reducible = xi.lax_function == PlusPart(Proj(1, 1))

    rows = []
    for tree in freelie.commutator_ideal_basis(2, max_degree):
        word_field = freelie.evaluate(tree, [xi1, xi2], ctx)
        analytic_coeff = None
        if gens is not None:
            analytic_coeff = word_in_algebra(tree, gens, FnAlgebra.PRIMED, split)([a, b])
        reduced_coeff = split.plus(freelie.evaluate(tree, [a, b])) if reducible else None
        for k, z in enumerate(Z):
            num = np.asarray(word_field([a, b], z))
            row = {"word": tree.to_json(), "degree": tree.degree, "probe": k,
                   "numeric": float(frobenius(num))}
            if analytic_coeff is not None:
                ana = bracket(analytic_coeff, z)
                row["analytic"] = float(frobenius(ana))
                row["numeric_vs_analytic"] = float(frobenius(num - ana))
            if reduced_coeff is not None:
                red = bracket(reduced_coeff, z)
                row["reduced"] = float(frobenius(red))
                if analytic_coeff is not None:
                    row["analytic_vs_reduced"] = float(frobenius(ana - red))
            rows.append(row)
    inputs = {
        "xi": xi.label,
        "a": a.tolist(),
        "b": b.tolist(),
        "probes": [z.tolist() for z in Z],
        "max_degree": max_degree,
        "fd_step": fd_step,
        "richardson": richardson,
    }
    max_defect = max(r["numeric"] for r in rows)
    extra = {}
    if gens is not None:
        extra["max_analytic"] = max(r["analytic"] for r in rows)
        extra["max_numeric_vs_analytic"] = max(r["numeric_vs_analytic"] for r in rows)
    return FlowReport("word-criterion", inputs, [], rows, max_defect, tolerance, extra=extra,
                      wall_time=_time.perf_counter() - started)


def commuting_solve(xi: Pvf, a, b, c, s: float, t: float, cfg: IntegratorConfig = DEFAULT_CONFIG,
                    order: str = "s-then-t"):
    """Flow ``(a, b, c)`` to ``(s, t)`` and return the ``c`` component.

    ``order="s-then-t"`` runs the first flow for ``s`` then the second for
    ``t``; ``"t-then-s"`` is the other path.  The two agree when ``(a, b)``
    satisfies zcc.
    """
    X1, X2 = _promoted_lifts(xi)
    state = [a, b, c]
    if order == "s-then-t":
        end = flow(X2, flow(X1, state, s, cfg), t, cfg)
    elif order == "t-then-s":
        end = flow(X1, flow(X2, state, t, cfg), s, cfg)
    else:
        raise ValueError(f"unknown path order {order!r}")
    return end[2]


def write_trajectory_csv(path, times: Sequence[float], states: Sequence[np.ndarray],
                         names: Sequence[str]) -> None:
    """Columns: step, time, then row-major entries of each tracked component."""
    states = [np.asarray(s) for s in states]
    n = states[0].shape[-1]
    header = ["step", "time"]
    for name in names:
        header += [f"{name}_{i + 1}{j + 1}" for i in range(n) for j in range(n)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k, (tk, yk) in enumerate(zip(times, states)):
            comps = yk.reshape(len(names), n, n) if yk.ndim == 3 or len(names) > 1 else yk.reshape(1, n, n)
            w.writerow([k, repr(float(tk))] + [repr(float(v)) for v in comps.reshape(-1)])
