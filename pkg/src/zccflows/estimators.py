"""scikit-learn style wrappers around the flows and the word criterion.

Samples are ``n x n`` matrices, so ``X`` is a 3-d array ``(m, n, n)``; a
pair of commuting-flow generators is a ``(2, n, n)`` array.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import freelie
from .exprfun import PlusPart, Proj
from .flows import dressed_flow
from .integrate import IntegratorConfig
from .liealg import MatrixAlgebra, conjugate, frobenius, get_splitting
from .pvf import lax, promote


def check_lie_array(X, algebra: MatrixAlgebra | None = None, ndim: int = 3, name: str = "X") -> np.ndarray:
    """Validate a stack of Lie algebra elements.

    ``ndim=3`` expects ``(m, n, n)``; a single ``(n, n)`` matrix is promoted
    to a stack of one.  ``ndim=4`` expects ``(m, k, n, n)`` tuples.
    """
    X = np.asarray(X, dtype=float)
    if ndim == 3 and X.ndim == 2:
        X = X[None]
    if X.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-d, got shape {X.shape}")
    if X.shape[-1] != X.shape[-2]:
        raise ValueError(f"{name} must hold square matrices, got shape {X.shape}")
    algebra = algebra or MatrixAlgebra(X.shape[-1], "sl")
    return algebra.validate(X, name)


def check_pair(X, algebra: MatrixAlgebra | None = None) -> np.ndarray:
    X = check_lie_array(X, algebra, name="pair")
    if X.shape[0] != 2:
        raise ValueError(f"expected a pair (a, b) of shape (2, n, n), got {X.shape}")
    return X


class CommutingFlow(TransformerMixin, BaseEstimator):
    """Carry matrices along the two flows generated by a pair ``(a, b)``.

    ``fit`` integrates the pair along ``s`` then ``t`` together with the
    dressing element; ``transform`` conjugates each sample by that element,
    which equals integrating ``dc/ds = [a_+, c]``, ``dc/dt = [b_+, c]``.
    """

    def __init__(self, s=1.0, t=1.0, splitting="skew-upper", method="dp54_adaptive",
                 rel_tol=1e-10, abs_tol=1e-12, step=1e-2):
        self.s = s
        self.t = t
        self.splitting = splitting
        self.method = method
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol
        self.step = step

    def _config(self):
        return IntegratorConfig(self.method, step=self.step, rel_tol=self.rel_tol, abs_tol=self.abs_tol)

    def fit(self, X, y=None):
        pair = check_pair(X)
        split = get_splitting(self.splitting)
        cfg = self._config()
        xi = lax(PlusPart(Proj(1, 1)), split)
        a, b = pair
        n = a.shape[-1]
        # third slot only rides along; the dressing element does the work
        state, g = dressed_flow(promote(xi, 1), [a, b, a], self.s, cfg=cfg)
        state, g = dressed_flow(promote(xi, 2), state, self.t, g0=g, cfg=cfg)
        self.pair_ = pair
        self.endpoint_ = np.stack(state[:2])
        self.group_element_ = g
        self.n_features_in_ = n * n
        return self

    def transform(self, X):
        check_is_fitted(self, "group_element_")
        C = check_lie_array(X)
        return conjugate(self.group_element_, C)

    def inverse_transform(self, X):
        check_is_fitted(self, "group_element_")
        C = check_lie_array(X)
        return conjugate(np.linalg.inv(self.group_element_), C)


class ZeroCurvatureClassifier(ClassifierMixin, BaseEstimator):
    """Predict whether pairs ``(a, b)`` satisfy zcc for ``xi(x, y) = [x_+, y]``.

    Uses the finite-degree form of the criterion: every commutator word
    ``w(a, b)`` up to ``max_degree`` must have a central plus part.
    ``decision_function`` is ``tol`` minus the worst commutator with the
    algebra basis, so positive means zcc.
    """

    def __init__(self, max_degree=4, splitting="skew-upper", tol=1e-9):
        self.max_degree = max_degree
        self.splitting = splitting
        self.tol = tol

    def fit(self, X, y=None):
        X = check_lie_array(X, ndim=4)
        self.n_ = X.shape[-1]
        self.algebra_ = MatrixAlgebra(self.n_, "sl")
        self.words_ = freelie.commutator_ideal_basis(2, self.max_degree)
        self.classes_ = np.array([False, True])
        return self

    def centrality_defect(self, X) -> np.ndarray:
        check_is_fitted(self, "words_")
        X = check_lie_array(X, self.algebra_, ndim=4)
        split = get_splitting(self.splitting)
        basis = self.algebra_.basis()
        a, b = X[:, 0], X[:, 1]
        worst = np.zeros(len(X))
        for w in self.words_:
            W = split.plus(freelie.evaluate(w, [a, b]))
            for e in basis:
                worst = np.maximum(worst, frobenius(W @ e - e @ W))
        return worst

    def decision_function(self, X):
        return self.tol - self.centrality_defect(X)

    def predict(self, X):
        return self.decision_function(X) >= 0
