import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from tslv.ode import dopri_steps


def last(gen):
    out = None
    for out in gen:
        pass
    return out


def test_logistic_closed_form():
    r, K, z0 = 0.8, 2.0, 0.1
    f = lambda t, u: [r * u[0] * (1 - u[0] / K)]  # noqa: E731
    t, u = last(dopri_steps(f, 0.0, [z0], 7.5, rtol=1e-11, atol=1e-12))
    assert t == 7.5
    exact = K * z0 / (z0 + (K - z0) * math.exp(-r * 7.5))
    assert u[0] == pytest.approx(exact, rel=1e-9)


def test_matches_scipy_on_competition_system():
    def f(t, u):
        x, y = u
        return [0.5 * x * (1 - x - 2 * y), 0.3 * y * (1 - y - 0.3 * x)]

    t, u = last(dopri_steps(f, 0.0, [0.4, 0.2], 20.0, rtol=1e-10, atol=1e-12))
    ref = solve_ivp(f, (0, 20), [0.4, 0.2], method="DOP853", rtol=1e-12, atol=1e-14).y[:, -1]
    assert np.allclose(u, ref, rtol=1e-7, atol=1e-10)


def test_steps_are_increasing_and_hit_endpoint():
    ts = [t for t, _ in dopri_steps(lambda t, u: [-u[0]], 1.0, [1.0], 3.0)]
    assert ts[-1] == 3.0
    assert all(b > a for a, b in zip(ts, ts[1:]))


def test_infinite_end_keeps_going():
    gen = dopri_steps(lambda t, u: [-u[0]], 0.0, [1.0], math.inf)
    ts = [next(gen)[0] for _ in range(400)]
    assert ts[-1] > 10


def test_step_limit():
    with pytest.raises(RuntimeError):
        last(dopri_steps(lambda t, u: [math.cos(50 * t)], 0.0, [0.0], 100.0, max_steps=5))
