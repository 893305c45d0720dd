"""Closed-form solutions for the sl_3 example.

Splitting: skew-symmetric plus upper triangular.  Initial pair
``a = E31``, ``b = E32`` (they commute).  The first flow moves ``a`` by
``da/ds = [a_+, a]``; ``b`` is carried along by the dressing element
``sigma(s)``; the second flow in ``t`` is dressed by ``tau(s, t)`` with
``tau(s, 0) = sigma(s)``.

``tau`` already contains ``sigma``: ``tau(s, t)`` conjugates the
*initial* matrices to their values at ``(s, t)``.  That is how
:func:`closed_form_a_st` and :func:`closed_form_c_st` are built, and the
displayed ``a(s, t)`` matrix agrees with it entry for entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .liealg import SKEW_UPPER, conjugate, elementary

A0 = elementary(3, 3, 1)
B0 = elementary(3, 3, 2)


def closed_form_a(s: float) -> np.ndarray:
    d = 1.0 + s * s
    return np.array([
        [-s / d, 0.0, -s * s / d],
        [0.0, 0.0, 0.0],
        [1.0 / d, 0.0, s / d],
    ])


def closed_form_sigma(s: float) -> np.ndarray:
    r = np.sqrt(1.0 + s * s)
    u, v = 1.0 / r, s / r
    return np.array([
        [u, 0.0, -v],
        [0.0, 1.0, 0.0],
        [v, 0.0, u],
    ])


def closed_form_b_s(s: float) -> np.ndarray:
    r = np.sqrt(1.0 + s * s)
    return np.array([
        [0.0, -s / r, 0.0],
        [0.0, 0.0, 0.0],
        [0.0, 1.0 / r, 0.0],
    ])


def closed_form_b_st(s: float, t: float) -> np.ndarray:
    p = np.sqrt(1.0 + s * s)
    q = 1.0 + s * s + t * t
    r = np.sqrt(q)
    return np.array([
        [0.0, -s / r, -s * t / (p * r)],
        [0.0, -t / q, -t * t / (p * q)],
        [0.0, p / q, t / q],
    ])


def closed_form_tau(s: float, t: float) -> np.ndarray:
    p = np.sqrt(1.0 + s * s)
    r = np.sqrt(1.0 + s * s + t * t)
    return np.array([
        [1.0 / p, 0.0, -s / p],
        [-s * t / (p * r), p / r, -t / (p * r)],
        [s / r, t / r, 1.0 / r],
    ])


def closed_form_a_st(s: float, t: float) -> np.ndarray:
    p2 = 1.0 + s * s
    p = np.sqrt(p2)
    q = 1.0 + s * s + t * t
    r = np.sqrt(q)
    return np.array([
        [-s / p2, s * s * t / (p2 * r), -s * s / (p * r)],
        [-t / (p2 * r), t * t * s / (q * p2), -t * s / (q * p)],
        [1.0 / (p * r), -t * s / (q * p), s / q],
    ])


def closed_form_c_st(s: float, t: float, c) -> np.ndarray:
    """``c(s, t) = tau(s, t) c tau(s, t)^{-1}``."""
    return conjugate(closed_form_tau(s, t), c)


def a_plus_of_s(s: float) -> np.ndarray:
    """``a(s)_+``, the coefficient of the first dressing ODE."""
    return SKEW_UPPER.plus(closed_form_a(s))


@dataclass(frozen=True)
class ClosedFormBundle:
    a_of_s: Callable = closed_form_a
    sigma_of_s: Callable = closed_form_sigma
    b_of_s: Callable = closed_form_b_s
    b_of_st: Callable = closed_form_b_st
    tau_of_st: Callable = closed_form_tau
    a_of_st: Callable = closed_form_a_st
    c_of_st: Callable = closed_form_c_st


SL3_EXAMPLE = ClosedFormBundle()
