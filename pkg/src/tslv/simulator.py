"""Hybrid simulation along a time scale.

Scattered points advance by the exact step map.  Dense intervals are
integrated with Dormand-Prince in log coordinates: positive components stay
positive by construction and zero components stay exactly zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import model, roots
from . import timescale as tsm
from .model import EquilibriumSet, ModelParams, State
from .ode import dopri_steps

__all__ = [
    "Mode",
    "Sample",
    "Budget",
    "Trajectory",
    "ConvergenceReport",
    "simulate",
    "detect_convergence",
    "region_trace",
    "convergence_stop",
]


class Mode(enum.Enum):
    Recursion = "Recursion"
    DenseODE = "DenseODE"


class Sample(NamedTuple):
    t: float
    state: State
    mu: float
    mode: Mode


@dataclass(frozen=True)
class Budget:
    """Simulation limits.

    With a ``horizon`` the run is expected to reach it, and hitting
    ``max_steps`` or ``dense_time`` first marks the trajectory truncated.
    Without one, those limits are simply where the run ends.
    """

    max_steps: int = 10_000
    dense_time: float = 1e6
    horizon: Optional[float] = None

    @classmethod
    def from_dict(cls, d: dict) -> "Budget":
        unknown = set(d) - {"max_steps", "dense_time", "horizon"}
        if unknown:
            raise ValueError(f"unknown budget keys: {sorted(unknown)}")
        horizon = d.get("horizon")
        return cls(int(d.get("max_steps", 10_000)), float(d.get("dense_time", 1e6)),
                   None if horizon is None else float(horizon))


@dataclass(frozen=True)
class Trajectory:
    samples: tuple
    params: ModelParams
    timescale: tsm.TimeScale
    truncated: bool = False
    reason: Optional[str] = None

    def __len__(self):
        return len(self.samples)

    @property
    def final(self) -> Sample:
        return self.samples[-1]

    def arrays(self):
        """``(t, x, y, mu)`` as numpy arrays."""
        a = np.array([(s.t, s.state.x, s.state.y, s.mu) for s in self.samples], dtype=float)
        return a[:, 0], a[:, 1], a[:, 2], a[:, 3]

    def recursion_steps(self) -> int:
        return sum(1 for s in self.samples[:-1] if s.mode is Mode.Recursion)


@dataclass(frozen=True)
class ConvergenceReport:
    converged: bool
    target: str
    final_distance: float
    steps_to_invariant_region: Optional[int]

    def to_dict(self) -> dict:
        return {"converged": self.converged, "target": self.target,
                "final_distance": self.final_distance,
                "steps_to_invariant_region": self.steps_to_invariant_region}


def _log_rhs(p: ModelParams, live_x: bool, live_y: bool):
    """Right-hand side of the mu = 0 system in log coordinates."""
    r, s_, a, b, K, L = p.r, p.s, p.alpha, p.beta, p.K, p.L
    if live_x and live_y:
        def f(t, u):
            x = math.exp(u[0])
            y = math.exp(u[1])
            return [r * (1.0 - x / K - a * y), s_ * (1.0 - y / L - b * x)]
    elif live_x:
        def f(t, u):
            return [r * (1.0 - math.exp(u[0]) / K)]
    else:
        def f(t, u):
            return [s_ * (1.0 - math.exp(u[0]) / L)]
    return f


def _dense_path(p, a, b, state, tol):
    """Accepted ODE steps on ``[a, b]`` as ``(t, State)``, ending at ``b``."""
    live = (state.x > 0, state.y > 0)
    if not any(live):
        yield b, state
        return
    u0 = [math.log(v) for v, on in zip(state, live) if on]
    f = _log_rhs(p, *live)
    for t, u in dopri_steps(f, a, u0, b, rtol=tol, atol=tol):
        it = iter(u)
        yield t, State(*(math.exp(next(it)) if on else 0.0 for on in live))


def simulate(p: ModelParams, ts: tsm.TimeScale, t0: float, s0, budget: Budget | None = None,
             tol: float = 1e-9, stop: Callable[[list], bool] | None = None) -> Trajectory:
    """Run the model from ``s0`` at ``t0``.

    ``stop(samples)`` is consulted after every recorded sample and ends the
    run early when it returns true.
    """
    budget = budget or Budget()
    x0, y0 = float(s0[0]), float(s0[1])
    if not (x0 >= 0 and y0 >= 0 and math.isfinite(x0) and math.isfinite(y0)):
        raise ValueError(f"initial state must be finite and nonnegative, got {s0!r}")
    ts._check(t0)
    horizon = budget.horizon
    if horizon is not None and horizon < t0:
        raise ValueError("horizon precedes t0")
    samples: list[Sample] = []
    state = State(x0, y0)
    steps = 0
    dense_used = 0.0

    def done(truncated=False, reason=None):
        return Trajectory(tuple(samples), p, ts, truncated and horizon is not None, reason)

    def emit(t, st, mu, mode):
        samples.append(Sample(t, st, mu, mode))
        return stop is not None and stop(samples)

    for entry in ts.walk(t0):
        if isinstance(entry, tsm.Point):
            t = entry.t
            if horizon is not None and t > horizon + tsm._tol(horizon):
                return done()
            if emit(t, state, entry.mu, Mode.Recursion):
                return done()
            if horizon is not None and t >= horizon - tsm._tol(horizon):
                return done()
            if steps >= budget.max_steps:
                return done(True, f"max_steps={budget.max_steps} reached at t={t!r}")
            if not math.isfinite(t + entry.mu):
                return Trajectory(tuple(samples), p, ts, True, f"time overflow after t={t!r}")
            state = model.step_map(p, entry.mu, state)
            steps += 1
            continue

        a = entry.a
        if horizon is not None and a > horizon + tsm._tol(horizon):
            return done()
        end, mu_end = entry.b, entry.mu_end
        if horizon is not None and end >= horizon:
            end, mu_end = horizon, 0.0
        cap = a + (budget.dense_time - dense_used)
        capped = end > cap
        if capped:
            end, mu_end = cap, 0.0
        if emit(a, state, 0.0, Mode.DenseODE):
            return done()
        t = a
        for t, st in _dense_path(p, a, end, state, tol):
            state = st
            if t == end:
                break
            if emit(t, state, 0.0, Mode.DenseODE):
                return done()
        dense_used += end - a
        if end > a:
            mode = Mode.Recursion if mu_end > 0 else Mode.DenseODE
            if emit(end, state, mu_end, mode):
                return done()
        if capped:
            return done(True, f"dense_time={budget.dense_time} used up at t={end!r}")
        if mu_end == 0:
            return done()
        if steps >= budget.max_steps:
            return done(True, f"max_steps={budget.max_steps} reached at t={end!r}")
        if not math.isfinite(end + mu_end):
            return Trajectory(tuple(samples), p, ts, True, f"time overflow after t={end!r}")
        state = model.step_map(p, mu_end, state)
        steps += 1
    return done()  # pragma: no cover - walks never end


def _line_report(p: ModelParams, window: list, tol: float):
    xs = np.array([s.state.x for s in window])
    ys = np.array([s.state.y for s in window])
    off = np.abs(ys - model.nullcline_h(p, xs))
    drift = max(np.max(np.abs(xs - xs[-1])), np.max(np.abs(ys - ys[-1])))
    on_segment = -tol <= xs[-1] <= p.K + tol
    ok = bool(np.all(off <= tol) and drift < tol and on_segment)
    xbar = xs[-1]
    return ok, f"line point ({xbar!r}, {float(model.nullcline_h(p, xbar))!r})", float(off[-1])


def _within(window: list, e: State, tol: float) -> bool:
    return all(max(abs(s.state.x - e.x), abs(s.state.y - e.y)) < tol for s in window)


def convergence_stop(eqs: EquilibriumSet, p: ModelParams | None = None, tol: float = 1e-8,
                     window: int = 10) -> Callable[[list], bool]:
    """Stop predicate matching :func:`detect_convergence`."""
    pts = list(eqs.points().values())

    def stop(samples):
        if len(samples) < window:
            return False
        last = samples[-window:]
        if any(_within(last, e, tol) for e in pts):
            return True
        return eqs.line and p is not None and _line_report(p, last, tol)[0]

    return stop


def _steps_to_invariant(traj: Trajectory) -> Optional[int]:
    names = roots.invariant_regions(traj.params)
    if not names:
        return None
    _, x, y, _ = traj.arrays()
    inside = np.zeros(len(x), dtype=bool)
    for name in names:
        inside |= np.asarray(roots.in_region(traj.params, (x, y), name), dtype=bool)
    if not inside[-1]:
        return None
    outside = np.flatnonzero(~inside)
    first = 0 if len(outside) == 0 else int(outside[-1]) + 1
    return sum(1 for s in traj.samples[:first] if s.mode is Mode.Recursion)


def detect_convergence(traj: Trajectory, eqs: EquilibriumSet, tol: float = 1e-8,
                       window: int = 10) -> ConvergenceReport:
    """Windowed convergence test on the last ``window`` samples (infinity norm)."""
    if not traj.samples:
        raise ValueError("empty trajectory")
    last = traj.samples[-window:]
    fx, fy = traj.final.state
    dists = {name: max(abs(fx - e.x), abs(fy - e.y)) for name, e in eqs.points().items()}
    nearest = min(dists, key=dists.get)
    steps = _steps_to_invariant(traj)
    if len(last) == window:
        for name, e in eqs.points().items():
            if _within(last, e, tol):
                return ConvergenceReport(True, name, dists[name], steps)
        if eqs.line:
            ok, label, dist = _line_report(traj.params, last, tol)
            if ok:
                return ConvergenceReport(True, label, dist, steps)
    return ConvergenceReport(False, nearest, dists[nearest], steps)


def region_trace(traj: Trajectory, tol: float = roots.BOUNDARY_TOL) -> list:
    return [(s.t, roots.classify_region(traj.params, s.state, tol=tol)) for s in traj.samples]
