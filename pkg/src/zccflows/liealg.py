"""Matrix Lie algebra arithmetic, splittings and group-level helpers.

Lie algebra elements are plain ``numpy`` arrays of shape ``(..., n, n)``.
Leading axes are treated as a batch, so every helper here works on a
single matrix as well as on a stack of them.  :class:`MatrixAlgebra`
carries the ambient algebra (``sl_n`` or ``gl_n``) and is what validates
inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

ALGEBRA_TOL = 1e-12
GROUP_TOL = 1e-9


class LieAlgebraError(ValueError):
    """Raised for malformed algebra or group elements and mismatched operands."""


@dataclass(frozen=True)
class MatrixAlgebra:
    """A matrix Lie algebra, ``sl_n`` (traceless) or ``gl_n``."""

    n: int = 3
    kind: str = "sl"
    tol: float = ALGEBRA_TOL

    def __post_init__(self):
        if self.kind not in ("sl", "gl"):
            raise LieAlgebraError(f"unknown algebra kind {self.kind!r}")
        if self.n < 1:
            raise LieAlgebraError("dimension must be positive")

    @property
    def tag(self) -> str:
        return f"{self.kind}_{self.n}"

    @property
    def dim(self) -> int:
        return self.n * self.n - (1 if self.kind == "sl" else 0)

    def validate(self, X, name: str = "X") -> np.ndarray:
        """Return ``X`` as a float array after checking shape, finiteness and trace."""
        X = np.asarray(X, dtype=float)
        if X.ndim < 2 or X.shape[-2:] != (self.n, self.n):
            raise LieAlgebraError(
                f"{name} has shape {X.shape}, expected (..., {self.n}, {self.n}) for {self.tag}"
            )
        if not np.all(np.isfinite(X)):
            raise LieAlgebraError(f"{name} has non-finite entries")
        if self.kind == "sl":
            tr = np.abs(np.trace(X, axis1=-2, axis2=-1))
            scale = max(1.0, float(np.max(np.abs(X), initial=0.0)))
            if np.any(tr > self.tol * scale):
                raise LieAlgebraError(f"{name} is not traceless (|trace| = {np.max(tr):.3e})")
        return X

    def contains(self, X) -> bool:
        try:
            self.validate(X)
        except LieAlgebraError:
            return False
        return True

    def basis(self) -> list[np.ndarray]:
        """Elementary basis: off-diagonal ``E_ij`` then ``E_ii - E_{i+1,i+1}`` (sl) or ``E_ii`` (gl)."""
        n = self.n
        out = []
        for i in range(n):
            for j in range(n):
                if i != j:
                    out.append(elementary(n, i + 1, j + 1))
        if self.kind == "gl":
            out.extend(elementary(n, i + 1, i + 1) for i in range(n))
        else:
            for i in range(n - 1):
                out.append(elementary(n, i + 1, i + 1) - elementary(n, i + 2, i + 2))
        return out

    def random(self, rng: np.random.Generator, size: int | tuple = ()) -> np.ndarray:
        """Entries uniform in [-1, 1]; for sl_n the trace is then removed."""
        shape = (size,) if isinstance(size, int) else tuple(size)
        X = rng.uniform(-1.0, 1.0, size=shape + (self.n, self.n))
        if self.kind == "sl":
            X = trace_free(X)
        return X


SL3 = MatrixAlgebra(3, "sl")


def elementary(n: int, i: int, j: int) -> np.ndarray:
    """The matrix unit ``E_ij`` (1-based indices)."""
    E = np.zeros((n, n))
    E[i - 1, j - 1] = 1.0
    return E


def trace_free(X) -> np.ndarray:
    X = np.array(X, dtype=float)
    n = X.shape[-1]
    tr = np.trace(X, axis1=-2, axis2=-1)
    idx = np.arange(n)
    X[..., idx, idx] -= (tr / n)[..., None]
    return X


def frobenius(X) -> np.ndarray | float:
    return np.sqrt(np.sum(np.square(X), axis=(-2, -1)))


def _check_pair(X, Y):
    if np.shape(X)[-2:] != np.shape(Y)[-2:]:
        raise LieAlgebraError(f"dimension mismatch: {np.shape(X)} vs {np.shape(Y)}")


def bracket(X, Y, algebra: MatrixAlgebra | None = None):
    """Matrix commutator ``XY - YX``.

    Works on arrays and on the dual numbers of :mod:`zccflows.dual`.  When an
    ``algebra`` is given both operands are validated against it first.
    """
    if algebra is not None:
        X = algebra.validate(X, "X")
        Y = algebra.validate(Y, "Y")
    _check_pair(X, Y)
    return X @ Y - Y @ X


def is_central(X, basis: Sequence[np.ndarray], tol: float = 1e-12) -> bool:
    if len(basis) == 0:
        raise LieAlgebraError("centrality needs a non-empty basis")
    X = np.asarray(X, dtype=float)
    worst = max(float(frobenius(bracket(X, e))) for e in basis)
    return worst <= tol


# -- splittings ---------------------------------------------------------------


def _lower_skew(X):
    L = np.tril(X, -1)
    return L - np.swapaxes(L, -1, -2)


def split_skew_upper(X) -> tuple[np.ndarray, np.ndarray]:
    """Split into (skew-symmetric, upper triangular) parts.

    The skew part is ``L - L^T`` with ``L`` the strictly lower triangle, so the
    remainder is upper triangular and the two parts add back to ``X`` exactly.
    """
    X = np.asarray(X, dtype=float)
    plus = _lower_skew(X)
    return plus, X - plus


@dataclass(frozen=True)
class Splitting:
    """A vector-space splitting ``g = g_plus + g_minus`` given by its plus projector.

    ``plus`` must be linear and act on the last two axes; it is applied
    component-wise to dual numbers, which is what makes derivatives of
    ``(.)_+`` exact.
    """

    name: str
    plus_map: Callable[[np.ndarray], np.ndarray]
    is_subalgebra_pair: bool = True

    def plus(self, X):
        from .dual import Dual

        if isinstance(X, Dual):
            return X.apply_linear(self.plus)
        return self.plus_map(np.asarray(X, dtype=float))

    def minus(self, X):
        return X - self.plus(X)

    def split(self, X):
        P = self.plus(X)
        return P, X - P


def _strict_lower(X):
    return np.tril(X, -1)


def _symmetric_part(X):
    return 0.5 * (X + np.swapaxes(X, -1, -2))


SKEW_UPPER = Splitting("skew-upper", _lower_skew)
IDENTITY_SPLIT = Splitting("identity", lambda X: np.array(X, dtype=float))
LOWER_UPPER = Splitting("lower-upper", _strict_lower)
# symmetric matrices are not closed under the bracket; negative control only
BROKEN_SPLIT = Splitting("broken-symmetric", _symmetric_part, is_subalgebra_pair=False)

SPLITTINGS = {s.name: s for s in (SKEW_UPPER, IDENTITY_SPLIT, LOWER_UPPER, BROKEN_SPLIT)}


def get_splitting(name_or_split) -> Splitting:
    if isinstance(name_or_split, Splitting):
        return name_or_split
    try:
        return SPLITTINGS[name_or_split]
    except KeyError:
        raise LieAlgebraError(
            f"unknown splitting {name_or_split!r}; choose from {sorted(SPLITTINGS)}"
        ) from None


def check_splitting(split: Splitting, algebra: MatrixAlgebra = SL3, tol: float = 1e-12) -> dict:
    """Probe the splitting on the elementary basis.

    Returns the worst idempotency, complementarity and closure defects, which
    is how the negative-control splittings are told apart from valid ones.
    """
    basis = algebra.basis()
    idem = max(float(frobenius(split.plus(split.plus(e)) - split.plus(e))) for e in basis)
    closure = 0.0
    for project in (split.plus, split.minus):
        imgs = [project(e) for e in basis]
        for X in imgs:
            for Y in imgs:
                Z = bracket(X, Y)
                closure = max(closure, float(frobenius(Z - project(Z))))
    return {
        "idempotency": idem,
        "closure": closure,
        "ok": idem <= tol and closure <= tol,
    }


# -- group level --------------------------------------------------------------


def check_group(g, n: int | None = None, tol: float = GROUP_TOL) -> np.ndarray:
    """Validate an ``SL_n`` element: square, finite, ``|det - 1| <= tol``."""
    g = np.asarray(g, dtype=float)
    if g.ndim < 2 or g.shape[-1] != g.shape[-2] or (n is not None and g.shape[-1] != n):
        raise LieAlgebraError(f"group element has shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise LieAlgebraError("group element has non-finite entries")
    det = np.linalg.det(g)
    if np.any(np.abs(det - 1.0) > tol):
        raise LieAlgebraError(f"|det - 1| = {np.max(np.abs(det - 1.0)):.3e} exceeds {tol:g}")
    return g


def conjugate(g, X) -> np.ndarray:
    """``g X g^{-1}``; this is what ``ad_g`` means for a group element."""
    g = np.asarray(g, dtype=float)
    X = np.asarray(X, dtype=float)
    _check_pair(g, X)
    if np.any(np.abs(np.linalg.det(g)) < 1e-14):
        raise LieAlgebraError("cannot conjugate by a singular matrix")
    # g X g^{-1} = (g^{-T} (g X)^T)^T, solved rather than inverted
    gX = g @ X
    return np.swapaxes(np.linalg.solve(np.swapaxes(g, -1, -2), np.swapaxes(gX, -1, -2)), -1, -2)


def renormalize_det(g) -> np.ndarray:
    """Rescale by ``det^{-1/n}`` so the determinant is exactly one (up to rounding)."""
    g = np.asarray(g, dtype=float)
    n = g.shape[-1]
    det = np.linalg.det(g)
    return g * (np.sign(det) * np.abs(det) ** (-1.0 / n))[..., None, None]


def matrix_from_json(obj) -> np.ndarray:
    """Read a row-major nested-list matrix literal."""
    A = np.asarray(obj, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise LieAlgebraError(f"matrix literal must be square, got shape {A.shape}")
    return A


def matrix_to_json(A) -> list:
    return np.asarray(A, dtype=float).tolist()
