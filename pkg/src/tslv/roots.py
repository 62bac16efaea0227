"""Root-operators, root curves and phase-plane regions.

The root-operator of the nullcline ``y = l(x)`` is ``y^sigma - l(x^sigma)``:
its sign says whether the next iterate lies above or below the nullcline.
For the two nontrivial nullclines both operators are rational in the
graininess with a numerator that is a quadratic polynomial in ``mu``::

    L_h = (a2 mu^2 + a1 mu + a0) / (alpha D)
    L_k = (b2 mu^2 + b1 mu + b0) / D
    D   = (K + r mu x + alpha r mu K y) (L + beta s mu L x + s mu y)

Everything below the dataclasses is elementwise arithmetic, usable with
numpy arrays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import model
from .model import ModelParams, Regime, State, nullcline_h, nullcline_k

__all__ = [
    "RootOperatorEval",
    "RegionLabel",
    "Region",
    "SignClaim",
    "RegimeMismatch",
    "BOUNDARY_TOL",
    "coeffs_a",
    "coeffs_b",
    "denominator",
    "numerator_h",
    "numerator_k",
    "eval_Lh",
    "eval_Lk",
    "root_curve",
    "region_family",
    "classify_region",
    "region_slack",
    "in_region",
    "invariant_regions",
    "sign_lemma_table",
]

BOUNDARY_TOL = 1e-10


class RegimeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class RootOperatorEval:
    value: float
    direct: float
    numerator: float
    coeffs: tuple
    denominator: float


def coeffs_a(p: ModelParams, x, y):
    r, s, al, be, K, L = p.r, p.s, p.alpha, p.beta, p.K, p.L
    a0 = L * (x - K + al * y * K)
    a1 = (be * s * L * x * (x - K)
          + y * (s * (x - K) + al * L * (r * (x - K) + s * K))
          + r * al**2 * y**2 * K * L)
    a2 = al * r * s * y * (y * K * (al * L - 1.0) + x * L * (1.0 - be * K))
    return a0, a1, a2


def coeffs_b(p: ModelParams, x, y):
    r, s, al, be, K, L = p.r, p.s, p.alpha, p.beta, p.K, p.L
    ky = y - L * (1.0 - be * x)
    b0 = K * L * ky
    b1 = L * (s * x * be * K * ky + r * x * L * (be * K - 1.0) + al * r * y * K * (y - L) + r * x * y)
    b2 = r * s * be * L * x * (L * x * (be * K - 1.0) + K * y * (1.0 - al * L))
    return b0, b1, b2


def denominator(p: ModelParams, mu, x, y):
    return ((p.K + p.r * mu * x + p.alpha * p.r * mu * p.K * y)
            * (p.L + p.beta * p.s * mu * p.L * x + p.s * mu * y))


def numerator_h(p: ModelParams, mu, x, y):
    a0, a1, a2 = coeffs_a(p, x, y)
    return (a2 * mu + a1) * mu + a0


def numerator_k(p: ModelParams, mu, x, y):
    b0, b1, b2 = coeffs_b(p, x, y)
    return (b2 * mu + b1) * mu + b0


def eval_Lh(p: ModelParams, mu: float, s: State) -> RootOperatorEval:
    x, y = s
    xs, ys = model.step_map(p, mu, s)
    direct = ys - nullcline_h(p, xs)
    c = coeffs_a(p, x, y)
    num = (c[2] * mu + c[1]) * mu + c[0]
    den = denominator(p, mu, x, y)
    return RootOperatorEval(num / (p.alpha * den), direct, num, c, den)


def eval_Lk(p: ModelParams, mu: float, s: State) -> RootOperatorEval:
    x, y = s
    xs, ys = model.step_map(p, mu, s)
    direct = ys - nullcline_k(p, xs)
    c = coeffs_b(p, x, y)
    num = (c[2] * mu + c[1]) * mu + c[0]
    den = denominator(p, mu, x, y)
    return RootOperatorEval(num / den, direct, num, c, den)


def _y_poly_h(p: ModelParams, mu, x):
    # N_a regrouped by powers of y
    r, s, al, be, K, L = p.r, p.s, p.alpha, p.beta, p.K, p.L
    c0 = L * (x - K) + mu * be * s * L * x * (x - K)
    c1 = (al * L * K + mu * (s * (x - K) + al * L * (r * (x - K) + s * K))
          + mu**2 * al * r * s * x * L * (1.0 - be * K))
    c2 = mu * r * al**2 * K * L + mu**2 * al * r * s * K * (al * L - 1.0)
    return c0, c1, c2


def _y_poly_k(p: ModelParams, mu, x):
    r, s, al, be, K, L = p.r, p.s, p.alpha, p.beta, p.K, p.L
    kx = L * (1.0 - be * x)
    c0 = (-K * L * kx + mu * L * (-s * x * be * K * kx + r * x * L * (be * K - 1.0))
          + mu**2 * r * s * be * L**2 * x**2 * (be * K - 1.0))
    c1 = (K * L + mu * L * (s * x * be * K - al * r * K * L + r * x)
          + mu**2 * r * s * be * L * x * K * (1.0 - al * L))
    c2 = mu * L * al * r * K
    return c0, c1, c2


def _quadratic_roots(c0: float, c1: float, c2: float) -> list[float]:
    scale = max(abs(c0), abs(c1), abs(c2))
    if scale == 0:
        return []
    if abs(c2) < 1e-14 * scale:
        return [] if c1 == 0 else [-c0 / c1]
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc < 0:
        if disc > -1e-14 * max(c1 * c1, abs(4.0 * c2 * c0)):
            disc = 0.0
        else:
            return []
    q = -0.5 * (c1 + math.copysign(math.sqrt(disc), c1))
    roots = [q / c2]
    if q != 0:
        roots.append(c0 / q)
    return sorted(set(roots))


def root_curve(p: ModelParams, mu: float, which: str, x_grid) -> list[tuple]:
    """Points ``(x, y)``, ``y >= 0``, of the root set of nullcline ``which``.

    For fixed ``x`` and ``mu`` the numerator is quadratic in ``y``; every
    nonnegative root is returned, and grid values without one are skipped.
    """
    if which == "h":
        poly = _y_poly_h
    elif which == "k":
        poly = _y_poly_k
    else:
        raise ValueError(f"which must be 'h' or 'k', got {which!r}")
    out = []
    for x in x_grid:
        x = float(x)
        if x < 0:
            raise ValueError("x_grid must be nonnegative")
        for y in _quadratic_roots(*poly(p, mu, x)):
            if y >= 0:
                out.append((x, y + 0.0))
    return out


class RegionLabel(enum.Enum):
    Omega1 = "Omega1"
    Omega2 = "Omega2"
    Omega3 = "Omega3"
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"
    R4 = "R4"
    R5 = "R5"
    R6 = "R6"
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"
    S4 = "S4"
    S5 = "S5"
    S6 = "S6"
    B0 = "B0"
    B1 = "B1"
    AboveLine = "AboveLine"
    BelowLine = "BelowLine"
    OnLine = "OnLine"


@dataclass(frozen=True)
class Region:
    """Phase-plane location of a state.

    ``label`` is the region of the active family, or ``None`` for points on
    a nullcline or axis in the R/S families (``flags`` says which).
    ``invariant`` names the positively invariant set containing the point.
    """

    label: Optional[RegionLabel]
    flags: frozenset = field(default_factory=frozenset)
    invariant: Optional[str] = None

    @property
    def name(self) -> str:
        if self.label is not None:
            return self.label.value
        return "+".join(sorted(self.flags)) or "none"


def region_family(p: ModelParams) -> str:
    regime = model.classify_regime(p)
    if regime is Regime.DegenerateLine:
        return "Line"
    if regime is Regime.Bistable:
        return "R"
    if regime is Regime.Coexistence:
        return "S"
    return "Omega"


def _omega_lower_upper(p: ModelParams, x):
    """Nullclines bounding Omega2 from below and above."""
    h = np.maximum(0.0, nullcline_h(p, x))
    k = np.maximum(0.0, nullcline_k(p, x))
    if _y_wins(p):
        return h, k
    return k, h


def _y_wins(p: ModelParams) -> bool:
    # MixedBoundary follows whichever exclusion case it borders
    da, db = p.aL - 1.0, p.bK - 1.0
    if abs(da) <= model.REGIME_TOL:
        return db < 0
    if abs(db) <= model.REGIME_TOL:
        return da > 0
    return da > 0 and db < 0


def _flags(p: ModelParams, x, y, tol) -> frozenset:
    flags = set()
    if x <= 0 or y <= 0:
        flags.add("OnAxis")
    h = nullcline_h(p, x)
    k = nullcline_k(p, x)
    if h >= -tol and abs(y - h) <= tol:
        flags.add("OnNullclineH")
    if k >= -tol and abs(y - k) <= tol:
        flags.add("OnNullclineK")
    return frozenset(flags)


def classify_region(p: ModelParams, s: State, family: str | None = None,
                    tol: float = BOUNDARY_TOL) -> Region:
    active = region_family(p)
    if family is not None and family != active:
        raise RegimeMismatch(f"region family {family!r} undefined in regime {model.classify_regime(p).value}")
    x, y = float(s[0]), float(s[1])
    if x < 0 or y < 0:
        raise ValueError("states must be nonnegative")
    flags = _flags(p, x, y, tol)
    invariant = next((name for name in invariant_regions(p) if in_region(p, s, name, tol)), None)
    h = nullcline_h(p, x)
    k = nullcline_k(p, x)

    if active == "Omega":
        if "OnAxis" in flags:
            return Region(None, flags, invariant)
        lo, hi = _omega_lower_upper(p, x)
        if y < lo - tol:
            label = RegionLabel.Omega1
        elif y <= hi + tol:
            label = RegionLabel.Omega2
        else:
            label = RegionLabel.Omega3
        return Region(label, flags, invariant)

    if active == "Line":
        if abs(y - h) <= tol:
            return Region(RegionLabel.OnLine, flags, invariant)
        if "OnAxis" in flags:
            return Region(None, flags, invariant)
        return Region(RegionLabel.AboveLine if y > h else RegionLabel.BelowLine, flags, invariant)

    if flags:
        return Region(None, flags, invariant)
    xs, ys = model.equilibria(p).Estar
    if x <= xs and y <= ys:
        return Region(RegionLabel.B0, flags, invariant)
    if x >= xs and y >= ys:
        return Region(RegionLabel.B1, flags, invariant)
    R = RegionLabel
    if active == "R":
        if x < xs:
            label = R.R1 if y < h else (R.R2 if y < k else R.R3)
        else:
            label = R.R4 if y < k else (R.R5 if y < h else R.R6)
    else:
        if x < xs:
            label = R.S1 if y < k else (R.S2 if y < h else R.S3)
        else:
            label = R.S4 if y < h else (R.S5 if y < k else R.S6)
    return Region(label, flags, invariant)


def invariant_regions(p: ModelParams) -> tuple:
    fam = region_family(p)
    return {"Omega": ("Omega2",), "R": ("R2T", "R5T"), "S": ("S2T", "S5T"), "Line": ()}[fam]


def region_slack(p: ModelParams, s, name: str):
    """Signed distance-like slack of ``s`` w.r.t. a closed or T-region.

    The smallest slack over the region's defining inequalities: nonnegative
    inside, negative outside.  T-regions are closures of the open regions
    intersected with the quadrant.  Works elementwise on arrays.
    """
    x, y = s
    h = nullcline_h(p, x)
    k = nullcline_k(p, x)
    fam = region_family(p)
    if name == "Omega2":
        if fam != "Omega":
            raise RegimeMismatch("Omega2 is defined only when one species is excluded")
        lo, hi = _omega_lower_upper(p, x)
        return np.minimum.reduce([x, y, y - lo, hi - y])
    if name not in ("B0", "B1", "R2T", "R5T", "S2T", "S5T"):
        raise ValueError(f"unknown region {name!r}")
    if name[0] in "RS" and fam != name[0]:
        raise RegimeMismatch(f"{name} undefined in regime {model.classify_regime(p).value}")
    if fam not in ("R", "S"):
        raise RegimeMismatch(f"{name} needs an interior equilibrium")
    xs, ys = model.equilibria(p).Estar
    if name == "B0":
        return np.minimum.reduce([x, y, xs - x, ys - y])
    if name == "B1":
        return np.minimum(x - xs, y - ys)
    if name == "R2T":
        return np.minimum.reduce([x, y, xs - x, y - h, k - y])
    if name == "R5T":
        return np.minimum.reduce([y, x - xs, p.K - x, y - np.maximum(0.0, k), h - y])
    if name == "S2T":
        return np.minimum.reduce([x, y, xs - x, y - k, h - y])
    return np.minimum.reduce([y, x - xs, 1.0 / p.beta - x, y - np.maximum(0.0, h), k - y])


def in_region(p: ModelParams, s, name: str, tol: float = BOUNDARY_TOL):
    """Membership in a closed or T-region, every inequality inflated by ``tol``."""
    return region_slack(p, s, name) >= -tol


@dataclass(frozen=True)
class SignClaim:
    """One machine-checkable sign statement about a root-operator.

    ``predicate(x, y, margin)`` selects the claimed region shrunk by
    ``margin`` away from its boundaries and from the interior equilibrium.
    """

    lemma: str
    operator: str
    sign: int
    region: str
    predicate: Callable = field(compare=False, repr=False)

    def to_dict(self) -> dict:
        return {"lemma": self.lemma, "operator": f"L_{self.operator}",
                "sign": "+" if self.sign > 0 else "-", "region": self.region}


def sign_lemma_table(p: ModelParams) -> list[SignClaim]:
    regime = model.classify_regime(p)
    h = lambda x: nullcline_h(p, x)  # noqa: E731
    k = lambda x: nullcline_k(p, x)  # noqa: E731

    if regime is Regime.ExclusionYWins:
        return [
            SignClaim("I.a", "h", +1, "x>0, y>max(0,h(x))",
                      lambda x, y, m: (x > m) & (y > np.maximum(0.0, h(x)) + m)),
            SignClaim("I.b", "k", -1, "x>0, 0<y<k(x)",
                      lambda x, y, m: (x > m) & (y > m) & (y < k(x) - m)),
        ]
    if regime is Regime.ExclusionXWins:
        return [
            SignClaim("II.a", "k", +1, "x>0, y>max(0,k(x))",
                      lambda x, y, m: (x > m) & (y > np.maximum(0.0, k(x)) + m)),
            SignClaim("II.b", "h", -1, "x>0, 0<y<h(x)",
                      lambda x, y, m: (x > m) & (y > m) & (y < h(x) - m)),
        ]
    if regime is Regime.DegenerateLine:
        return [
            SignClaim("degenerate.above", "h", +1, "y>h(x)",
                      lambda x, y, m: (x > m) & (y > m) & (y > h(x) + m)),
            SignClaim("degenerate.below", "h", -1, "y<h(x)",
                      lambda x, y, m: (x > m) & (y > m) & (y < h(x) - m)),
        ]
    if regime is Regime.MixedBoundary:
        raise RegimeMismatch("no sign table for a single boundary equality")

    xs, ys = model.equilibria(p).Estar

    def off_star(x, y, m):
        return np.maximum(np.abs(x - xs), np.abs(y - ys)) > m

    if regime is Regime.Bistable:
        return [
            SignClaim("III.a", "h", +1, "0<x<=x*, y>h(x)",
                      lambda x, y, m: (x > m) & (x <= xs) & (y > h(x) + m) & off_star(x, y, m)),
            SignClaim("III.b", "h", -1, "x*<=x<K, 0<y<h(x)",
                      lambda x, y, m: (x >= xs) & (x < p.K - m) & (y > m) & (y < h(x) - m) & off_star(x, y, m)),
            SignClaim("III.c", "k", -1, "0<x<x*, y*<=y<k(x)",
                      lambda x, y, m: (x > m) & (x < xs - m) & (y >= ys) & (y < k(x) - m) & off_star(x, y, m)),
            SignClaim("III.d", "k", +1, "x*<=x<K, max(0,k(x))<y<=y*",
                      lambda x, y, m: (x >= xs) & (x < p.K - m) & (y > np.maximum(0.0, k(x)) + m)
                      & (y <= ys) & off_star(x, y, m)),
        ]
    return [
        SignClaim("IV.a", "h", -1, "0<x<=x*, y*<=y<h(x)",
                  lambda x, y, m: (x > m) & (x <= xs) & (y >= ys) & (y < h(x) - m) & off_star(x, y, m)),
        SignClaim("IV.b", "h", +1, "x>=x*, max(0,h(x))<y<=y*",
                  lambda x, y, m: (x >= xs) & (y > np.maximum(0.0, h(x)) + m) & (y <= ys) & off_star(x, y, m)),
        SignClaim("IV.c", "k", +1, "0<x<=x*, y>k(x)",
                  lambda x, y, m: (x > m) & (x <= xs) & (y > k(x) + m) & off_star(x, y, m)),
        SignClaim("IV.d", "k", -1, "x*<=x<1/beta, 0<y<k(x)",
                  lambda x, y, m: (x >= xs) & (x < 1.0 / p.beta - m) & (y > m) & (y < k(x) - m)
                  & off_star(x, y, m)),
    ]
