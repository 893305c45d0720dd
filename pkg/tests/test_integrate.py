import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from zccflows.integrate import IntegrationError, IntegratorConfig, dp54, integrate, rk4


def decay(t, y):
    return -y + np.sin(t)


def exact_decay(t, y0):
    # y' = -y + sin t
    return (y0 + 0.5) * np.exp(-t) + 0.5 * (np.sin(t) - np.cos(t))


def test_dp54_scalar_exact():
    y, _, _ = dp54(decay, np.array([1.0]), 0.0, 3.0, 1e-10, 1e-12)
    assert abs(y[0] - exact_decay(3.0, 1.0)) <= 1e-9


def test_rk4_order_linear_system(rng):
    A = rng.normal(size=(3, 3))
    y0 = rng.normal(size=3)
    exact = expm(2.0 * A) @ y0
    errs = [np.linalg.norm(rk4(lambda t, y: A @ y, y0, 0.0, 2.0, h)[0] - exact) for h in [0.1, 0.05, 0.025]]
    assert errs[0] / errs[1] >= 12 and errs[1] / errs[2] >= 12


def test_rk4_order_quadrature():
    errs = [abs(rk4(lambda t, y: np.cos(t) + 0 * y, np.zeros(1), 0.0, 2.0, h)[0][0] - np.sin(2.0))
            for h in [0.2, 0.1, 0.05]]
    assert errs[0] / errs[1] >= 15 and errs[1] / errs[2] >= 15


def test_against_scipy(rng):
    A = rng.normal(size=(4, 4))

    def rhs(t, y):
        return A @ y + np.cos(t) * y ** 2 * 0.1

    y0 = rng.normal(size=4) * 0.3
    ref = solve_ivp(rhs, (0, 1.5), y0, method="DOP853", rtol=1e-12, atol=1e-14).y[:, -1]
    y, _, _ = integrate(rhs, y0, 0.0, 1.5, IntegratorConfig())
    np.testing.assert_allclose(y, ref, atol=1e-8)


def test_backwards_and_zero_interval():
    y, times, states = integrate(decay, np.array([1.0]), 0.0, 0.0, IntegratorConfig(), record=True)
    assert y[0] == 1.0 and times == [0.0]
    fwd, _, _ = integrate(decay, np.array([1.0]), 0.0, 1.0, IntegratorConfig())
    back, _, _ = integrate(decay, fwd, 1.0, 0.0, IntegratorConfig())
    assert abs(back[0] - 1.0) <= 1e-8


def test_record_is_monotone():
    _, times, states = integrate(decay, np.array([1.0]), 0.0, 1.0, IntegratorConfig(), record=True)
    assert times[0] == 0.0 and times[-1] == pytest.approx(1.0)
    assert np.all(np.diff(times) > 0)
    assert len(times) == len(states)


def test_post_step_hook():
    calls = []

    def hook(y):
        calls.append(1)
        return y

    integrate(decay, np.array([1.0]), 0.0, 1.0, IntegratorConfig("rk4_fixed", step=0.1), post_step=hook)
    assert len(calls) == 10


def test_max_steps_exhausted():
    with pytest.raises(IntegrationError) as info:
        integrate(decay, np.array([1.0]), 0.0, 1.0, IntegratorConfig(max_steps=2))
    assert len(info.value.times) >= 1
    with pytest.raises(IntegrationError):
        integrate(decay, np.array([1.0]), 0.0, 1.0, IntegratorConfig("rk4_fixed", step=0.01, max_steps=5))


def test_blowup_raises():
    with pytest.raises(IntegrationError):
        integrate(lambda t, y: y ** 2, np.array([1.0]), 0.0, 2.0, IntegratorConfig())


@pytest.mark.parametrize("kw", [{"method": "euler"}, {"step": 0.0}, {"rel_tol": -1.0}, {"max_steps": 0}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        IntegratorConfig(**kw)
