"""Named parameter sets and time scales used by the CLI, suites and tests."""

from __future__ import annotations

from .model import ModelParams
from .timescale import Lattice, PatternUnion, Quantum, Reals, TimeScale, timescale_from_dict

# one representative per regime; inequalities hold with wide margins
PARAMS = {
    "fig2": ModelParams(r=0.5, s=0.3, alpha=2.0, beta=0.3, K=1.0, L=1.0),
    "xwins": ModelParams(r=0.5, s=0.3, alpha=0.3, beta=2.0, K=1.0, L=1.0),
    "bistable": ModelParams(r=1.0, s=1.0, alpha=2.0, beta=2.0, K=1.0, L=1.0),
    "coexistence": ModelParams(r=1.0, s=1.0, alpha=0.5, beta=0.5, K=1.0, L=1.0),
    "degenerate": ModelParams(r=0.7, s=1.3, alpha=0.5, beta=0.25, K=4.0, L=2.0),
}

# name -> (time scale, default t0)
TIMESCALES = {
    "Z": (Lattice(1.0, 0.0), 0.0),
    "quantum": (Quantum(2.0, 1.0), 1.0),
    "fig5": (PatternUnion(((1.0, 1.0), (2.0, 3.0)), 3.0, 1.0), 1.0),
    "R": (Reals(), 0.0),
}

# (2, 1) plus one start below h and one far above k, all at t = 1 on 2^N
FIG2_STARTS = ((2.0, 1.0), (0.2, 0.1), (1.5, 2.0))


def params_from(spec) -> ModelParams:
    """Accept a preset name, a dict, or a ModelParams."""
    if isinstance(spec, ModelParams):
        return spec
    if isinstance(spec, str):
        try:
            return PARAMS[spec]
        except KeyError:
            raise ValueError(f"unknown parameter preset {spec!r}; choose from {sorted(PARAMS)}") from None
    if isinstance(spec, dict):
        return ModelParams.from_dict(spec)
    raise ValueError(f"cannot read parameters from {spec!r}")


def timescale_from(spec) -> tuple[TimeScale, float]:
    """Time scale plus a default start point from a preset name or dict."""
    if isinstance(spec, TimeScale):
        return spec, _first_guess(spec)
    if isinstance(spec, str):
        try:
            return TIMESCALES[spec]
        except KeyError:
            raise ValueError(f"unknown time scale preset {spec!r}; choose from {sorted(TIMESCALES)}") from None
    if isinstance(spec, dict):
        ts = timescale_from_dict(spec)
        return ts, _first_guess(ts)
    raise ValueError(f"cannot read a time scale from {spec!r}")


def _first_guess(ts: TimeScale) -> float:
    if isinstance(ts, Lattice):
        return ts.origin
    if isinstance(ts, Quantum):
        return ts.start
    if isinstance(ts, PatternUnion):
        return ts.pattern[0][0]
    return 0.0
