"""Dormand-Prince 5(4) with embedded error control.

Small fixed-size systems only: states are plain lists of floats, which keeps
the per-step overhead far below that of a general-purpose solver.
"""

from __future__ import annotations

import math
from typing import Callable, Iterator, Sequence

# Butcher tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6]
# 5th minus 4th order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


def _norm(err, y, ynew, rtol, atol):
    acc = 0.0
    for e, a, b in zip(err, y, ynew):
        sc = atol + rtol * max(abs(a), abs(b))
        acc += (e / sc) ** 2
    return math.sqrt(acc / len(err))


def _initial_step(f, t0, y0, f0, rtol, atol, span):
    d0 = _norm(y0, y0, y0, rtol, atol) if any(y0) else 0.0
    d1 = _norm(f0, y0, y0, rtol, atol)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = [a + h0 * b for a, b in zip(y0, f0)]
    f1 = f(t0 + h0, y1)
    d2 = _norm([a - b for a, b in zip(f1, f0)], y0, y0, rtol, atol) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def dopri_steps(f: Callable[[float, list], list], t0: float, y0: Sequence[float],
                t_end: float, rtol: float = 1e-9, atol: float = 1e-9,
                max_steps: int = 1_000_000) -> Iterator[tuple[float, list]]:
    """Yield ``(t, y)`` after every accepted step, ending exactly at ``t_end``.

    ``t_end`` may be ``inf``; the caller then decides when to stop.
    """
    t = t0
    y = list(y0)
    if t_end <= t0:
        return
    k1 = f(t, y)
    h = _initial_step(f, t, y, k1, rtol, atol, min(t_end - t0, 1e6))
    for _ in range(max_steps):
        last = t + h >= t_end
        if last:
            h = t_end - t
        ks = [k1]
        for i in range(1, 7):
            row = _A[i]
            yi = [y[j] + h * sum(row[m] * ks[m][j] for m in range(i)) for j in range(len(y))]
            ks.append(f(t + _C[i] * h, yi))
        ynew = yi  # stage 7 is evaluated at the 5th order solution (FSAL)
        err = [h * sum(_E[m] * ks[m][j] for m in range(7)) for j in range(len(y))]
        en = _norm(err, y, ynew, rtol, atol)
        if en <= 1.0:
            t = t_end if last else t + h
            y = ynew
            k1 = ks[6]
            yield t, y
            if last:
                return
            factor = MAX_FACTOR if en == 0 else min(MAX_FACTOR, SAFETY * en ** -0.2)
        else:
            factor = max(MIN_FACTOR, SAFETY * en ** -0.2)
        h *= factor
        if t + h == t:
            raise FloatingPointError(f"step size underflow at t={t!r}")
    raise RuntimeError("integrator step limit reached")
