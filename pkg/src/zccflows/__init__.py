"""Zero-curvature checks for commuting Lax-type flows on matrix Lie algebras."""

from .exprfun import Bracket, ConstElem, LinComb, PlusPart, Proj, dir_deriv, evaluate, primed_bracket
from .flows import FlowReport, commuting_solve, dressing_solve, flow, word_criterion_check, zcc_check
from .freelie import LyndonTree, commutator_ideal_basis, lyndon_basis
from .integrate import IntegrationError, IntegratorConfig
from .liealg import SL3, SKEW_UPPER, LieAlgebraError, MatrixAlgebra, bracket, conjugate, split_skew_upper
from .pvf import Pvf, lax, lift, project, promote, pvf_bracket_numeric

__version__ = "0.1.0"

__all__ = [
    "Bracket", "ConstElem", "LinComb", "PlusPart", "Proj", "dir_deriv", "evaluate", "primed_bracket",
    "FlowReport", "commuting_solve", "dressing_solve", "flow", "word_criterion_check", "zcc_check",
    "LyndonTree", "commutator_ideal_basis", "lyndon_basis",
    "IntegrationError", "IntegratorConfig",
    "SL3", "SKEW_UPPER", "LieAlgebraError", "MatrixAlgebra", "bracket", "conjugate", "split_skew_upper",
    "Pvf", "lax", "lift", "project", "promote", "pvf_bracket_numeric",
]
