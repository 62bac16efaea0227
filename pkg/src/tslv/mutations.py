"""Deliberate model defects for checking that the harness notices them.

Each mutation is a context manager that patches a few attributes; every
check in :mod:`tslv.verifier` fails under at least one of them.
"""

from __future__ import annotations

import contextlib
import math
from unittest import mock

from . import model, roots
from . import timescale as tsm
from .model import State

_coeffs_a = roots.coeffs_a
_circle_minus = tsm.circle_minus


def _flip_a1(p, x, y):
    a0, a1, a2 = _coeffs_a(p, x, y)
    return a0, -a1, a2


def _drop_competition(p, mu, s):
    x, y = s
    if mu == 0:
        return State(x, y)
    xs = x * (1.0 + p.r * mu) / (1.0 + p.r * mu * x / p.K)
    ys = y * (1.0 + p.s * mu) / (1.0 + p.s * mu * y / p.L)
    return State(xs, ys)


def _drop_self_limitation(p, mu, s):
    x, y = s
    if mu == 0:
        return State(x, y)
    xs = x * (1.0 + p.r * mu) / (1.0 + p.r * mu * p.alpha * y)
    ys = y * (1.0 + p.s * mu) / (1.0 + p.s * mu * p.beta * x)
    return State(xs, ys)


def _circle_minus_no_mu(z, mu):
    return _circle_minus(z, 0.0)


def _log_factor_no_mu(self, mu):
    f = 1.0 - mu * self.z
    return math.copysign(1.0, f), math.log(abs(f))


# name -> ((patched object, attribute, replacement), ...), description
MUTATIONS = {
    "flip_a1": (((roots, "coeffs_a", _flip_a1),), "sign of a1 flipped in the L_h numerator"),
    "drop_competition": (((model, "step_map", _drop_competition),), "step map without the alpha/beta terms"),
    "drop_self_limitation": (((model, "step_map", _drop_self_limitation),),
                             "step map without the x/K, y/L terms"),
    "circle_minus_no_mu": (((tsm, "circle_minus", _circle_minus_no_mu),
                            (tsm.CircleMinus, "log_factor", _log_factor_no_mu)),
                           "circle-minus ignores the graininess"),
}


@contextlib.contextmanager
def mutated(name: str):
    try:
        patches, _ = MUTATIONS[name]
    except KeyError:
        raise ValueError(f"unknown mutation {name!r}; known: {sorted(MUTATIONS)}") from None
    with contextlib.ExitStack() as stack:
        for target, attr, replacement in patches:
            stack.enter_context(mock.patch.object(target, attr, replacement))
        yield
