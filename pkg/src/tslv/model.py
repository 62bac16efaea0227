"""Two-species competition model on a time scale.

    x^Delta = r x^sigma (1 - x/K - alpha y) / (1 + r mu)
    y^Delta = s y^sigma (1 - y/L - beta x)  / (1 + s mu)

The arithmetic helpers work elementwise on floats or numpy arrays, so the
verifier can push whole sample batches through them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

from . import timescale as tsm

__all__ = [
    "ModelParams",
    "State",
    "Regime",
    "EquilibriumSet",
    "REGIME_TOL",
    "DIVIDED_FORM_MU",
    "step_map",
    "vector_field",
    "nullcline_h",
    "nullcline_k",
    "equilibria",
    "classify_regime",
    "logistic_closed_form",
    "boundedness_envelope",
]

REGIME_TOL = 1e-12
# above this graininess the step map is evaluated with numerator and
# denominator divided by mu
DIVIDED_FORM_MU = 1e8


@dataclass(frozen=True)
class ModelParams:
    r: float
    s: float
    alpha: float
    beta: float
    K: float
    L: float

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"parameter {name} must be a positive finite number, got {value!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        missing = {"r", "s", "alpha", "beta", "K", "L"} - set(d)
        if missing:
            raise ValueError(f"missing parameters: {sorted(missing)}")
        return cls(*(float(d[k]) for k in ("r", "s", "alpha", "beta", "K", "L")))

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def aL(self) -> float:
        return self.alpha * self.L

    @property
    def bK(self) -> float:
        return self.beta * self.K


class State(NamedTuple):
    x: float
    y: float


class Regime(enum.Enum):
    ExclusionYWins = "ExclusionYWins"
    ExclusionXWins = "ExclusionXWins"
    Bistable = "Bistable"
    Coexistence = "Coexistence"
    DegenerateLine = "DegenerateLine"
    MixedBoundary = "MixedBoundary"


@dataclass(frozen=True)
class EquilibriumSet:
    E0: State
    EK: State
    EL: State
    Estar: Optional[State]
    line: bool

    def points(self) -> dict[str, State]:
        pts = {"E0": self.E0, "EK": self.EK, "EL": self.EL}
        if self.Estar is not None:
            pts["Estar"] = self.Estar
        return pts


def _xy_sigma(p: ModelParams, mu, x, y):
    if mu > DIVIDED_FORM_MU:
        inv = 1.0 / mu
        xs = x * (inv + p.r) / (inv + p.r * (x / p.K + p.alpha * y))
        ys = y * (inv + p.s) / (inv + p.s * (y / p.L + p.beta * x))
    else:
        xs = x * (1.0 + p.r * mu) / (1.0 + p.r * mu * (x / p.K + p.alpha * y))
        ys = y * (1.0 + p.s * mu) / (1.0 + p.s * mu * (y / p.L + p.beta * x))
    return xs, ys


def step_map(p: ModelParams, mu: float, s: State) -> State:
    """Image of ``s`` after one step of graininess ``mu``.

    Uses the positive rational form, so nonnegative input stays nonnegative
    in floating point; ``mu == 0`` returns ``s`` unchanged.
    """
    if mu == 0:
        return State(s[0], s[1])
    return State(*_xy_sigma(p, mu, s[0], s[1]))


def vector_field(p: ModelParams, mu: float, s: State) -> tuple:
    x, y = s
    dx = p.r * x * (1.0 - x / p.K - p.alpha * y) / (1.0 + p.r * mu * (x / p.K + p.alpha * y))
    dy = p.s * y * (1.0 - y / p.L - p.beta * x) / (1.0 + p.s * mu * (y / p.L + p.beta * x))
    return dx, dy


def nullcline_h(p: ModelParams, x):
    return (1.0 - x / p.K) / p.alpha


def nullcline_k(p: ModelParams, x):
    return p.L * (1.0 - p.beta * x)


def classify_regime(p: ModelParams) -> Regime:
    da = p.aL - 1.0
    db = p.bK - 1.0
    za = abs(da) <= REGIME_TOL
    zb = abs(db) <= REGIME_TOL
    if za and zb:
        return Regime.DegenerateLine
    if za or zb:
        return Regime.MixedBoundary
    if da > 0 and db < 0:
        return Regime.ExclusionYWins
    if da < 0 and db > 0:
        return Regime.ExclusionXWins
    if da > 0:
        return Regime.Bistable
    return Regime.Coexistence


def equilibria(p: ModelParams) -> EquilibriumSet:
    regime = classify_regime(p)
    estar = None
    if regime in (Regime.Bistable, Regime.Coexistence):
        det = p.alpha * p.beta * p.K * p.L - 1.0
        estar = State(p.K * (p.aL - 1.0) / det, p.L * (p.bK - 1.0) / det)
    return EquilibriumSet(
        E0=State(0.0, 0.0),
        EK=State(p.K, 0.0),
        EL=State(0.0, p.L),
        Estar=estar,
        line=regime is Regime.DegenerateLine,
    )


def logistic_closed_form(r: float, Kcap: float, ts: tsm.TimeScale, t0: float,
                         z0: float, t: float) -> float:
    """Single-species solution ``e K z0 / (K + z0 (e - 1))`` with ``e = e_r(t, t0)``."""
    if z0 == 0:
        return 0.0
    e = tsm.exp_ts(ts, r, t, t0)
    # divided by e, so an overflowing e_r gives Kcap
    return Kcap * z0 / (z0 + (Kcap - z0) / e)


def boundedness_envelope(r: float, Kcap: float, ts: tsm.TimeScale, t0: float,
                         x0: float, t: float) -> float:
    """Upper bound on ``x(t)`` for any nonnegative competitor.

    ``K x0 / (x0 (1 - e) + K e)`` with ``e = e_{circle-minus r}(t, t0)``.
    """
    e = tsm.exp_ts(ts, tsm.CircleMinus(r), t, t0)
    return Kcap * x0 / (x0 * (1.0 - e) + Kcap * e)
