import numpy as np
import pytest

from zccflows.exprfun import Bracket, ConstElem, PlusPart, Proj, primed_bracket, random_expr
from zccflows.liealg import SKEW_UPPER, SL3, bracket, frobenius
from zccflows.freelie import evaluate as eval_word, standard_bracketing
from zccflows.pvf import (LiftedField, Pvf, PvfError, lax, lift, project, promote, pvf_bracket_numeric,
                          pvf_context, tau)

P = SKEW_UPPER.plus
XI = lax(PlusPart(Proj(1, 1)))


def real_pvf(fn, label="f"):
    return Pvf(1, lambda p, y: fn(p[0], y), label=label)


def poly_pvf(rng, order):
    # random polynomial field on the real line
    c = rng.normal(size=(order + 1, 3))

    def field_(params, point):
        a = list(params) + [point]
        return sum(c[k, 0] + c[k, 1] * a[k] + c[k, 2] * a[k] ** 2 for k in range(order + 1)) * (1 + 0.1 * point)

    return Pvf(order, field_)


def test_example_on_real_line():
    f = real_pvf(lambda x, y: x ** 2)
    g = real_pvf(lambda x, y: y)
    fg = pvf_bracket_numeric(f, g)
    for x in [-1.0, -0.5, 0.0, 0.5, 1.0]:
        for y in [-0.3, 0.8]:
            assert abs(fg([x], y) - (-x ** 2)) <= 1e-6


def test_lift_real_line():
    f = real_pvf(lambda x, y: x * y + 2 * y, "f")
    x, y = 0.7, -1.3
    assert lift(f)([x, y]) == [x * x + 2 * x, x * y + 2 * y]


def test_lift_of_lax_field(rng):
    a, y = SL3.random(rng, 2)
    comps = lift(XI)([a, y])
    np.testing.assert_allclose(comps[0], bracket(P(a), a), atol=1e-15)
    np.testing.assert_allclose(comps[1], bracket(P(a), y), atol=1e-15)


def test_constant_field(rng):
    C = SL3.random(rng)
    const = Pvf(2, lambda p, y: C)
    a = list(SL3.random(rng, 3))
    for comp in lift(const)(a):
        np.testing.assert_array_equal(comp, C)
    y = SL3.random(rng)
    np.testing.assert_allclose(lax(ConstElem(C, 1))([a[0]], y), bracket(C, y), atol=1e-15)


def test_project_left_inverse(rng):
    for _ in range(50):
        xi = poly_pvf(rng, 2)
        a = list(rng.normal(size=3))
        assert project(lift(xi))(a[:2], a[2]) == xi(a[:2], a[2])


def test_lift_project_not_identity(rng):
    # a generic field on R^2 is not a lift
    eta = LiftedField(1, lambda a: [a[0] + a[1], a[0] * a[1]])
    a = [0.4, 1.7]
    assert lift(project(eta))(a) != eta(a)


def test_lift_project_on_lifts(rng):
    for _ in range(20):
        xi = poly_pvf(rng, 2)
        eta = LiftedField(2, lift(xi).components)  # no source shortcut
        a = list(rng.normal(size=3))
        np.testing.assert_allclose(lift(project(eta))(a), eta(a), rtol=0, atol=1e-12)


def test_tau_equivariance(rng):
    # X(tau_i(a)) = D tau_i [X(a)], and D tau_i v = (v_1..v_n, v_i)
    for _ in range(50):
        xi = poly_pvf(rng, 2)
        X = lift(xi)
        a = list(rng.normal(size=3))
        for i in (1, 2, 3):
            lhs = X(tau(a, i))
            v = X(a)
            rhs = v[:-1] + [v[i - 1]]
            np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-10)


def test_generic_field_not_equivariant():
    eta = LiftedField(1, lambda a: [a[0] + a[1], a[0] * a[1]])
    a = [0.4, 1.7]
    v = eta(a)
    assert eta(tau(a, 1)) != v[:-1] + [v[0]]


def test_bracket_self_zero(rng):
    xi = poly_pvf(rng, 1)
    assert abs(pvf_bracket_numeric(xi, xi)([0.3], -0.2)) <= 1e-9
    a, y = SL3.random(rng, 2)
    assert frobenius(pvf_bracket_numeric(XI, XI)([a], y)) <= 1e-9


def test_bracket_antisymmetry_and_jacobi(rng):
    f, g, h = (poly_pvf(rng, 1) for _ in range(3))
    fg, gf = pvf_bracket_numeric(f, g), pvf_bracket_numeric(g, f)
    cyc = [
        pvf_bracket_numeric(f, pvf_bracket_numeric(g, h, 1e-2, True), 1e-2, True),
        pvf_bracket_numeric(g, pvf_bracket_numeric(h, f, 1e-2, True), 1e-2, True),
        pvf_bracket_numeric(h, pvf_bracket_numeric(f, g, 1e-2, True), 1e-2, True),
    ]
    for x, y in rng.uniform(-1, 1, size=(10, 2)):
        assert abs(fg([x], y) + gf([x], y)) <= 1e-8
        assert abs(sum(c([x], y) for c in cyc)) <= 1e-4


def test_bracket_errors():
    f = Pvf(1, lambda p, y: y)
    g = Pvf(2, lambda p, y: y)
    with pytest.raises(PvfError):
        pvf_bracket_numeric(f, g)
    with pytest.raises(PvfError):
        pvf_bracket_numeric(f, f, fd_step=0.0)
    with pytest.raises(PvfError):
        f([1.0, 2.0], 0.0)
    with pytest.raises(PvfError):
        promote(g, 1)
    with pytest.raises(PvfError):
        promote(f, 3)


def test_lax_bracket_oracle(rng):
    for _ in range(3):
        f, g = random_expr(rng, 1, 3), random_expr(rng, 1, 3)
        num = pvf_bracket_numeric(lax(f), lax(g))
        ana = lax(primed_bracket(f, g))
        for _ in range(5):
            x, y = SL3.random(rng, 2)
            assert frobenius(num([x], y) - ana([x], y)) <= 1e-5


def test_lax_bracket_is_lax(rng):
    # linear in y: additivity and homogeneity
    f, g = random_expr(rng, 1, 2), random_expr(rng, 1, 2)
    fg = pvf_bracket_numeric(lax(f), lax(g))
    for _ in range(5):
        x, y1, y2 = SL3.random(rng, 3)
        assert frobenius(fg([x], y1 + y2) - fg([x], y1) - fg([x], y2)) <= 1e-6
        assert frobenius(fg([x], 2.5 * y1) - 2.5 * fg([x], y1)) <= 1e-6


def test_promote(rng):
    a, b, y = SL3.random(rng, 3)
    X1, X2 = lift(promote(XI, 1)), lift(promote(XI, 2))
    for got, want in zip(X1([a, b, y]), [bracket(P(a), a), bracket(P(a), b), bracket(P(a), y)]):
        np.testing.assert_allclose(got, want, atol=1e-15)
    for got, want in zip(X2([a, b, y]), [bracket(P(b), a), bracket(P(b), b), bracket(P(b), y)]):
        np.testing.assert_allclose(got, want, atol=1e-15)
    np.testing.assert_array_equal(promote(XI, 1)([a, a], y), promote(XI, 2)([a, a], y))
    assert promote(XI, 2).lax_function == PlusPart(Proj(2, 2))


def test_lax_carries_function():
    f = Bracket(Proj(1, 1), PlusPart(Proj(1, 1)))
    assert lax(f).lax_function is f
    assert lax(f).order == 1


def test_words_on_pvfs(rng):
    # nested Richardson brackets of Lax fields against the primed word
    f, g = Proj(1, 1), PlusPart(Proj(1, 1))
    ctx = pvf_context(1e-2, richardson=True)
    tree = standard_bracketing((1, 1, 2))
    num = eval_word(tree, [lax(f), lax(g)], ctx)
    ana = lax(primed_bracket(f, primed_bracket(f, g)))
    x, y = SL3.random(rng, 2)
    assert frobenius(num([x], y) - ana([x], y)) <= 1e-6
