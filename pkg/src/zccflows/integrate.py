"""Explicit Runge-Kutta integrators on stacked matrix states.

The state is any float array; the right-hand side is ``rhs(t, y) -> dy``.
Two schemes are provided: classical fixed-step RK4 and the adaptive
Dormand-Prince 5(4) pair.  Both accept a ``post_step`` hook applied to each
accepted state, which is how determinant renormalization is done for
group-valued ODEs.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

METHODS = ("dp54_adaptive", "rk4_fixed")


class IntegrationError(RuntimeError):
    """Integration failed; carries the partial trajectory."""

    def __init__(self, message, times=None, states=None):
        super().__init__(message)
        self.times = [] if times is None else times
        self.states = [] if states is None else states


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "dp54_adaptive"
    step: float = 1e-2
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 100_000
    group_projection: bool = True

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown integrator {self.method!r}; choose from {METHODS}")
        if not (self.step > 0 and self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("step and tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")

    def to_dict(self) -> dict:
        return asdict(self)


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def _check_finite(y, t, times, states):
    if not np.all(np.isfinite(y)):
        raise IntegrationError(f"non-finite state at t = {t:g}", times, states)


def rk4(rhs, y0, t0, t1, step, post_step=None, max_steps=100_000, record=False):
    """Fixed-step RK4; the last step is shortened to land on ``t1``."""
    y = np.array(y0, dtype=float)
    times, states = [t0], [y.copy()] if record else []
    if t1 == t0:
        return y, times, states
    n = int(np.ceil(abs(t1 - t0) / step - 1e-12))
    if n > max_steps:
        raise IntegrationError(f"{n} steps needed, max_steps = {max_steps}", times, states)
    h = (t1 - t0) / n
    t = t0
    for i in range(n):
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + (h / 2) * k1)
        k3 = rhs(t + h / 2, y + (h / 2) * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + (i + 1) * h
        if post_step is not None:
            y = post_step(y)
        _check_finite(y, t, times, states)
        if record:
            times.append(t)
            states.append(y.copy())
    return y, times, states


def dp54(rhs, y0, t0, t1, rel_tol, abs_tol, post_step=None, max_steps=100_000, record=False,
         first_step=None):
    """Adaptive Dormand-Prince 5(4) with local extrapolation and FSAL."""
    y = np.array(y0, dtype=float)
    times, states = [t0], [y.copy()] if record else []
    span = t1 - t0
    if span == 0:
        return y, times, states
    direction = np.sign(span)
    t = t0
    f = rhs(t, y)
    if first_step is None:
        scale = abs_tol + rel_tol * np.abs(y)
        d0 = np.sqrt(np.mean((y / scale) ** 2))
        d1 = np.sqrt(np.mean((f / scale) ** 2))
        h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
        h = min(h, abs(span))
    else:
        h = min(first_step, abs(span))
    steps = 0
    while direction * (t1 - t) > 0:
        if steps >= max_steps:
            raise IntegrationError(f"max_steps = {max_steps} exhausted at t = {t:g}", times, states)
        h = min(h, abs(t1 - t))
        hs = direction * h
        k = [f]
        for i in range(1, 7):
            yi = y + hs * sum(a * kj for a, kj in zip(_A[i], k) if a != 0.0)
            k.append(rhs(t + _C[i] * hs, yi))
        y_new = y + hs * sum(b * kj for b, kj in zip(_B5, k) if b != 0.0)
        err_vec = hs * sum(e * kj for e, kj in zip(_E, k) if e != 0.0)
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = np.sqrt(np.mean((err_vec / scale) ** 2))
        steps += 1
        if not np.isfinite(err):
            raise IntegrationError(f"non-finite error estimate at t = {t:g}", times, states)
        if err <= 1.0:
            t = t1 if abs(t1 - (t + hs)) < 1e-14 * max(1.0, abs(t1)) else t + hs
            if post_step is not None:
                y_new = post_step(y_new)
                f = rhs(t, y_new)
            else:
                f = k[6]
            y = y_new
            _check_finite(y, t, times, states)
            if record:
                times.append(t)
                states.append(y.copy())
            factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            factor = max(0.2, 0.9 * err ** -0.2)
        h *= factor
        if h < 1e-14 * max(1.0, abs(t)):
            raise IntegrationError(f"step size underflow at t = {t:g}", times, states)
    return y, times, states


def integrate(rhs: Callable, y0, t0: float, t1: float, cfg: IntegratorConfig,
              post_step: Callable | None = None, record: bool = False):
    """Dispatch on ``cfg.method``; returns ``(y1, times, states)``."""
    if cfg.method == "rk4_fixed":
        return rk4(rhs, y0, t0, t1, cfg.step, post_step, cfg.max_steps, record)
    return dp54(rhs, y0, t0, t1, cfg.rel_tol, cfg.abs_tol, post_step, cfg.max_steps, record)
