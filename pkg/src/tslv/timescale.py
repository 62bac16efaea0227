"""Time scales described by finite generators.

A time scale is a closed subset of the reals that is unbounded above.  We
support four generator families:

* ``Reals`` -- the real line, graininess zero everywhere.
* ``Lattice(h, origin)`` -- ``origin + h*Z``.
* ``Quantum(q, start)`` -- ``{start * q**n : n >= 0}``.
* ``PatternUnion(pattern, period, anchor)`` -- a finite union of isolated
  points and closed intervals, repeated with a fixed period.

Enumeration goes through :meth:`TimeScale.walk`, which yields an endless
sequence of :class:`Point` (isolated, right-scattered points) and
:class:`Segment` (dense intervals) entries.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Union

__all__ = [
    "PointClass",
    "Point",
    "Segment",
    "TimeScale",
    "Reals",
    "Lattice",
    "Quantum",
    "PatternUnion",
    "PointNotInScale",
    "NotRegressive",
    "BudgetExceeded",
    "sigma",
    "graininess",
    "point_class",
    "grid",
    "circle_minus",
    "CircleMinus",
    "exp_ts",
    "timescale_from_dict",
]

MEMBER_TOL = 1e-12


class PointNotInScale(ValueError):
    pass


class NotRegressive(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """Raised when an enumeration budget runs out before its horizon."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class PointClass(enum.Enum):
    RightDense = "RightDense"
    RightScattered = "RightScattered"


@dataclass(frozen=True)
class Point:
    """An isolated point ``t`` whose successor is ``t + mu``."""

    t: float
    mu: float

    @property
    def point_class(self) -> PointClass:
        return PointClass.RightScattered if self.mu > 0 else PointClass.RightDense


@dataclass(frozen=True)
class Segment:
    """A dense interval ``[a, b]``.

    ``mu_end`` is the graininess at ``b``; it is zero when the segment was cut
    at a horizon inside a longer interval.
    """

    a: float
    b: float
    mu_end: float = 0.0

    @property
    def point_class(self) -> PointClass:
        return PointClass.RightDense


Entry = Union[Point, Segment]


def _tol(t: float) -> float:
    return MEMBER_TOL * max(1.0, abs(t))


class TimeScale:
    """Common interface; subclasses implement ``contains``, ``sigma``, ``walk``."""

    kind: str = ""

    def contains(self, t: float) -> bool:
        raise NotImplementedError

    def sigma(self, t: float) -> float:
        raise NotImplementedError

    def walk(self, t0: float) -> Iterator[Entry]:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def mu(self, t: float) -> float:
        return max(self.sigma(t) - t, 0.0)

    def _check(self, t: float) -> None:
        if not self.contains(t):
            raise PointNotInScale(f"{t!r} is not a point of {self!r}")


@dataclass(frozen=True)
class Reals(TimeScale):
    kind = "reals"

    def contains(self, t):
        return math.isfinite(t)

    def sigma(self, t):
        self._check(t)
        return t

    def walk(self, t0):
        self._check(t0)
        yield Segment(t0, math.inf, 0.0)

    def to_dict(self):
        return {"kind": "reals"}


@dataclass(frozen=True)
class Lattice(TimeScale):
    h: float = 1.0
    origin: float = 0.0
    kind = "lattice"

    def __post_init__(self):
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "origin", float(self.origin))
        if not self.h > 0:
            raise ValueError("lattice step must be positive")

    def _index(self, t):
        n = round((t - self.origin) / self.h)
        if abs(self.origin + n * self.h - t) > _tol(t):
            raise PointNotInScale(f"{t!r} is not a point of {self!r}")
        return n

    def contains(self, t):
        try:
            self._index(t)
        except PointNotInScale:
            return False
        return True

    def sigma(self, t):
        n = self._index(t)
        return self.origin + (n + 1) * self.h

    def walk(self, t0):
        n = self._index(t0)
        while True:
            yield Point(self.origin + n * self.h, self.h)
            n += 1

    def to_dict(self):
        return {"kind": "lattice", "h": self.h, "origin": self.origin}


@dataclass(frozen=True)
class Quantum(TimeScale):
    q: float = 2.0
    start: float = 1.0
    kind = "quantum"

    def __post_init__(self):
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "start", float(self.start))
        if not self.q > 1:
            raise ValueError("quantum base must exceed 1")
        if not self.start > 0:
            raise ValueError("quantum start must be positive")

    def _index(self, t):
        if not t > 0:
            raise PointNotInScale(f"{t!r} is not a point of {self!r}")
        n = round(math.log(t / self.start, self.q))
        if n < 0 or abs(self.start * self.q**n - t) > _tol(t):
            raise PointNotInScale(f"{t!r} is not a point of {self!r}")
        return n

    def contains(self, t):
        try:
            self._index(t)
        except (PointNotInScale, OverflowError):
            return False
        return True

    def sigma(self, t):
        n = self._index(t)
        return self.start * self.q ** (n + 1)

    def walk(self, t0):
        n = self._index(t0)
        t = self.start * self.q**n
        while True:
            nxt = t * self.q
            yield Point(t, nxt - t)
            t = nxt

    def to_dict(self):
        return {"kind": "quantum", "q": self.q, "start": self.start}


@dataclass(frozen=True)
class PatternUnion(TimeScale):
    """Periodic union of points and intervals.

    ``pattern`` holds ``(a, b)`` pairs in absolute coordinates for period 0,
    with ``a == b`` for an isolated point.  Copies shifted by ``k*period``
    for ``k >= 0`` make up the scale.
    """

    pattern: tuple = ((1.0, 1.0), (2.0, 3.0))
    period: float = 3.0
    anchor: float = 1.0
    kind = "pattern"

    def __post_init__(self):
        pat = tuple(sorted((float(a), float(b)) for a, b in self.pattern))
        object.__setattr__(self, "pattern", pat)
        object.__setattr__(self, "period", float(self.period))
        object.__setattr__(self, "anchor", float(self.anchor))
        if not pat:
            raise ValueError("pattern must not be empty")
        if not self.period > 0:
            raise ValueError("period must be positive")
        prev = -math.inf
        for a, b in pat:
            if b < a:
                raise ValueError(f"interval [{a}, {b}] is reversed")
            if a <= prev:
                raise ValueError("pattern elements must be disjoint and separated")
            prev = b
        if pat[0][0] < self.anchor or pat[-1][1] >= self.anchor + self.period:
            raise ValueError("pattern must lie in [anchor, anchor + period)")

    def _element(self, idx: int):
        k, j = divmod(idx, len(self.pattern))
        a, b = self.pattern[j]
        shift = k * self.period
        return a + shift, b + shift

    def _locate(self, t):
        """Return (element index, is_interior_of_interval)."""
        k0 = math.floor((t - self.anchor) / self.period)
        n = len(self.pattern)
        tol = _tol(t)
        for k in (k0 - 1, k0, k0 + 1):
            if k < 0:
                continue
            for j in range(n):
                a, b = self._element(k * n + j)
                if a - tol <= t <= b + tol:
                    return k * n + j, (b > a and t < b - tol)
        raise PointNotInScale(f"{t!r} is not a point of {self!r}")

    def contains(self, t):
        try:
            self._locate(t)
        except PointNotInScale:
            return False
        return True

    def sigma(self, t):
        idx, interior = self._locate(t)
        if interior:
            return t
        return self._element(idx + 1)[0]

    def walk(self, t0):
        idx, interior = self._locate(t0)
        a, b = self._element(idx)
        nxt = self._element(idx + 1)[0]
        if interior:
            yield Segment(t0, b, nxt - b)
        else:
            yield Point(b, nxt - b)
        while True:
            idx += 1
            a, b = self._element(idx)
            nxt = self._element(idx + 1)[0]
            if b > a:
                yield Segment(a, b, nxt - b)
            else:
                yield Point(a, nxt - a)

    def to_dict(self):
        items = [{"point": a} if a == b else {"interval": [a, b]} for a, b in self.pattern]
        return {"kind": "pattern", "pattern": items, "period": self.period, "anchor": self.anchor}


def timescale_from_dict(d: dict) -> TimeScale:
    kind = d.get("kind")
    if kind == "reals":
        return Reals()
    if kind == "lattice":
        return Lattice(float(d.get("h", 1.0)), float(d.get("origin", 0.0)))
    if kind == "quantum":
        return Quantum(float(d.get("q", 2.0)), float(d.get("start", 1.0)))
    if kind == "pattern":
        pattern = []
        for item in d["pattern"]:
            if "point" in item:
                pattern.append((float(item["point"]),) * 2)
            elif "interval" in item:
                a, b = item["interval"]
                pattern.append((float(a), float(b)))
            else:
                raise ValueError(f"unknown pattern element {item!r}")
        anchor = float(d.get("anchor", min(a for a, _ in pattern)))
        return PatternUnion(tuple(pattern), float(d["period"]), anchor)
    raise ValueError(f"unknown time scale kind {kind!r}")


def sigma(ts: TimeScale, t: float) -> float:
    return ts.sigma(t)


def graininess(ts: TimeScale, t: float) -> float:
    return ts.mu(t)


def point_class(ts: TimeScale, t: float) -> PointClass:
    return PointClass.RightScattered if ts.mu(t) > 0 else PointClass.RightDense


def grid(ts: TimeScale, t0: float, horizon: float | None = None,
         max_points: int | None = None) -> list[Entry]:
    """Enumerate ``ts`` from ``t0``.

    Stops at ``horizon`` (inclusive; a dense interval crossing it is cut) or
    after ``max_points`` entries.  When both are given and the points run out
    first, :class:`BudgetExceeded` is raised with the partial list attached.
    """
    if horizon is None and max_points is None:
        raise ValueError("grid needs a horizon or max_points")
    if horizon is not None and horizon < t0:
        raise ValueError("horizon precedes t0")
    if max_points is not None and max_points <= 0:
        raise ValueError("max_points must be positive")
    out: list[Entry] = []
    for entry in ts.walk(t0):
        start = entry.t if isinstance(entry, Point) else entry.a
        if horizon is not None and start > horizon + _tol(horizon):
            return out
        if max_points is not None and len(out) == max_points:
            if horizon is None:
                return out
            raise BudgetExceeded(f"max_points={max_points} reached before horizon {horizon}", out)
        if isinstance(entry, Segment) and horizon is not None and entry.b > horizon:
            entry = Segment(entry.a, horizon, 0.0)
        if not math.isfinite(start):
            raise BudgetExceeded("time scale left the representable range", out)
        out.append(entry)
        if isinstance(entry, Segment) and not math.isfinite(entry.b):
            return out
    return out


def circle_minus(z: float, mu: float) -> float:
    """Time-scale additive inverse ``-z / (1 + mu z)``."""
    den = 1.0 + mu * z
    if abs(den) <= MEMBER_TOL:
        raise NotRegressive(f"1 + mu*z vanishes for z={z!r}, mu={mu!r}")
    return -z / den


@dataclass(frozen=True)
class CircleMinus:
    """The rate ``circle-minus z`` as a function of the graininess.

    :func:`exp_ts` recognizes it and uses ``1 + mu (circle-minus z) =
    1 / (1 + mu z)``, which avoids the cancellation of the literal
    ``1 - mu z / (1 + mu z)`` when ``mu z`` is large.
    """

    z: float

    def __call__(self, mu: float) -> float:
        return circle_minus(self.z, mu)

    def log_factor(self, mu: float) -> tuple[float, float]:
        """``(sign, log|.|)`` of ``1 + mu (circle-minus z)``."""
        den = 1.0 + mu * self.z
        if abs(den) <= MEMBER_TOL:
            raise NotRegressive(f"1 + mu*z vanishes for z={self.z!r}, mu={mu!r}")
        return math.copysign(1.0, den), -math.log(abs(den))


Rate = Union[float, Callable[[float], float]]


def _log_factor(p: Rate, mu: float, t: float) -> tuple[float, float]:
    if isinstance(p, CircleMinus):
        return p.log_factor(mu)
    factor = 1.0 + mu * (p(mu) if callable(p) else p)
    if abs(factor) <= MEMBER_TOL:
        raise NotRegressive(f"1 + mu p vanishes at t={t!r}")
    return math.copysign(1.0, factor), math.log(abs(factor))


def exp_ts(ts: TimeScale, p: Rate, t: float, t0: float) -> float:
    """Time-scale exponential ``e_p(t, t0)``.

    ``p`` is a constant, a :class:`CircleMinus`, or any callable of the
    graininess for rates that depend on time only through ``mu``.  The
    value is the product of ``1 + mu p`` over scattered points times
    ``exp(p * dense length)``; for ``t < t0`` the reciprocal of
    ``e_p(t0, t)`` is returned.  Magnitudes beyond the double range come
    back as ``inf``.
    """
    if t < t0:
        return 1.0 / exp_ts(ts, p, t0, t)
    ts._check(t)
    log_abs = 0.0
    sign = 1.0
    tol = _tol(t)
    for entry in ts.walk(t0):
        if isinstance(entry, Point):
            if entry.t >= t - tol:
                break
            sg, lg = _log_factor(p, entry.mu, entry.t)
            sign *= sg
            log_abs += lg
        else:
            end = min(entry.b, t)
            log_abs += (p(0.0) if callable(p) else p) * (end - entry.a)
            if entry.b >= t - tol:
                break
            sg, lg = _log_factor(p, entry.mu_end, entry.b)
            sign *= sg
            log_abs += lg
    if log_abs > 709.0:
        return sign * math.inf
    return sign * math.exp(log_abs)
