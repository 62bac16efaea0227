"""Verification harness: sign claims, invariance, convergence and friends.

Every check returns a :class:`CheckReport`.  Randomness comes from numpy's
PCG64 generator seeded with ``SeedSequence([seed, *sha256(check_id)[:16]])``,
so a check's stream depends only on the suite seed and its id, never on the
order or process in which checks run.
"""

from __future__ import annotations

import hashlib
import inspect
import json
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import model, presets, roots
from . import timescale as tsm
from .model import ModelParams, Regime, State
from .roots import RegimeMismatch
from .simulator import Budget, Mode, convergence_stop, detect_convergence, simulate

__all__ = [
    "CheckReport",
    "ConfigInvalid",
    "make_rng",
    "check_sign_lemmas",
    "check_invariance",
    "check_global_convergence",
    "check_box_exclusion",
    "check_boundedness",
    "check_root_formulas",
    "check_logistic",
    "check_exp_identities",
    "CHECKS",
    "run_suite",
    "reports_to_json",
    "reports_to_table",
    "envelope_along",
]

DEFAULT_MU_SET = (0.0, 0.01, 0.5, 1.0, 10.0, 1000.0)
SIGN_MARGIN = 1e-8
REGION_TOL = roots.BOUNDARY_TOL
# |y - h(x)| below this counts as "on the line" for the side-constancy test
LINE_DEADBAND = 1e-12


class ConfigInvalid(ValueError):
    pass


@dataclass
class CheckReport:
    check_id: str
    check: str
    samples: int
    violations: int
    worst_margin: Optional[float]
    elapsed: float
    verdict: str = ""
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.verdict = "pass" if self.violations == 0 else "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self, elapsed: bool = True) -> dict:
        d = asdict(self)
        if not elapsed:
            d.pop("elapsed")
        return d


def make_rng(seed: int, check_id: str) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    digest = hashlib.sha256(check_id.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *words])))


def sampling_box(p: ModelParams) -> tuple[float, float]:
    return 2.0 * max(p.K, 1.0 / p.beta), 2.0 * max(p.L, 1.0 / p.alpha)


def _rejection(rng, accept, n, x_hi, y_hi, x_lo=0.0, y_lo=0.0, max_rounds=1000):
    xs, ys, got = [], [], 0
    batch = max(1024, 2 * n)
    for _ in range(max_rounds):
        x = rng.uniform(x_lo, x_hi, batch)
        y = rng.uniform(y_lo, y_hi, batch)
        keep = np.asarray(accept(x, y), dtype=bool)
        xs.append(x[keep])
        ys.append(y[keep])
        got += int(keep.sum())
        if got >= n:
            return np.concatenate(xs)[:n], np.concatenate(ys)[:n]
    raise RuntimeError(f"rejection sampling found only {got} of {n} points")


def _positive_starts(rng, p, n):
    X, Y = sampling_box(p)
    return _rejection(rng, lambda x, y: (x > 0) & (y > 0), n, X, Y)


def _finite_min(values, default=None):
    values = [v for v in values if v is not None]
    return float(min(values)) if values else default


# -- root-operator sign claims -------------------------------------------

def check_sign_lemmas(p: ModelParams, n_samples: int = 10_000, mu_set: Sequence[float] = DEFAULT_MU_SET,
                      seed: int = 0, check_id: str = "sign_lemmas", margin: float = SIGN_MARGIN) -> CheckReport:
    """Sample each claimed region and assert the claimed operator sign."""
    t_start = time.perf_counter()
    claims = roots.sign_lemma_table(p)
    rng = make_rng(seed, check_id)
    X, Y = sampling_box(p)
    violations, worst, per_claim = 0, [], {}
    for claim in claims:
        x, y = _rejection(rng, lambda a, b: claim.predicate(a, b, margin), n_samples, X, Y)
        bad = 0
        for mu in mu_set:
            den = roots.denominator(p, mu, x, y)
            if claim.operator == "h":
                value = roots.numerator_h(p, mu, x, y) / (p.alpha * den)
            else:
                value = roots.numerator_k(p, mu, x, y) / den
            signed = claim.sign * value
            bad += int(np.count_nonzero(~(signed > 0)))
            worst.append(float(np.min(signed)))
        violations += bad
        per_claim[claim.lemma] = {**claim.to_dict(), "violations": bad}
    return CheckReport(check_id, "sign_lemmas", n_samples * len(claims) * len(mu_set), violations,
                       _finite_min(worst), time.perf_counter() - t_start,
                       details={"regime": model.classify_regime(p).value, "claims": per_claim,
                                "mu_set": list(mu_set)})


# -- positive invariance --------------------------------------------------

def _boundary_arcs(p: ModelParams, name: str):
    """``(x_lo, x_hi, curve)`` for the nullcline arcs bounding a region."""
    xs = None if name == "Omega2" else model.equilibria(p).Estar.x
    if name == "Omega2":
        return [(0.0, p.K, "h"), (0.0, 1.0 / p.beta, "k")]
    if name in ("R2T", "S2T"):
        return [(0.0, xs, "h"), (0.0, xs, "k")]
    if name in ("R5T", "S5T"):
        return [(xs, p.K, "h"), (xs, 1.0 / p.beta, "k")]
    raise ValueError(f"no boundary arcs for {name!r}")


def _region_starts(rng, p, name, n, boundary_fraction):
    n_arc = int(round(n * boundary_fraction))
    X, Y = sampling_box(p)
    x_in, y_in = _rejection(rng, lambda x, y: roots.region_slack(p, (x, y), name) > 0, n - n_arc, X, Y)
    arcs = _boundary_arcs(p, name)
    bx, by = [], []
    while len(bx) < n_arc:
        lo, hi, curve = arcs[len(bx) % len(arcs)]
        x = float(rng.uniform(lo, hi))
        y = float(model.nullcline_h(p, x) if curve == "h" else model.nullcline_k(p, x))
        if x > 0 and y > 0:
            bx.append(x)
            by.append(y)
    return list(zip(x_in.tolist(), y_in.tolist())), list(zip(bx, by))


def check_invariance(p: ModelParams, ts: tsm.TimeScale, region_id: str, n_starts: int = 1000,
                     budget: Budget | None = None, seed: int = 0, t0: float | None = None,
                     check_id: str = "invariance", boundary_fraction: float = 0.5,
                     tol: float = REGION_TOL, ode_tol: float = 1e-12) -> CheckReport:
    """Start inside a positively invariant region (half on its boundary arcs)
    and require every later sample to stay in it up to ``tol``.

    Dense stretches are integrated at ``ode_tol``, which has to sit below
    ``tol``: near a corner equilibrium the regions are thin wedges and a
    1e-9 integrator drifts out of them by about its own tolerance.
    """
    t_start = time.perf_counter()
    if region_id not in roots.invariant_regions(p):
        raise RegimeMismatch(f"{region_id} is not an invariant region in regime {model.classify_regime(p).value}")
    t0 = presets.timescale_from(ts)[1] if t0 is None else t0
    rng = make_rng(seed, check_id)
    interior, arcs = _region_starts(rng, p, region_id, n_starts, boundary_fraction)
    stop = convergence_stop(model.equilibria(p), p)
    exits, worst, examples = 0, [], []
    for kind, starts in (("interior", interior), ("boundary", arcs)):
        for s0 in starts:
            traj = simulate(p, ts, t0, s0, budget, tol=ode_tol, stop=stop)
            _, x, y, _ = traj.arrays()
            slack = roots.region_slack(p, (x, y), region_id)
            m = float(np.min(slack))
            worst.append(m)
            if m < -tol:
                exits += 1
                if len(examples) < 5:
                    i = int(np.argmax(slack < -tol))
                    examples.append({"start": list(s0), "kind": kind, "exit_t": traj.samples[i].t,
                                     "exit_state": [x[i], y[i]], "slack": slack[i]})
    return CheckReport(check_id, "invariance", n_starts, exits, _finite_min(worst),
                       time.perf_counter() - t_start,
                       details={"region": region_id, "timescale": ts.to_dict(),
                                "interior_starts": len(interior), "boundary_starts": len(arcs),
                                "exits": examples})


# -- global convergence ---------------------------------------------------

def expected_targets(p: ModelParams) -> set:
    regime = model.classify_regime(p)
    if regime is Regime.ExclusionYWins:
        return {"EL"}
    if regime is Regime.ExclusionXWins:
        return {"EK"}
    if regime is Regime.Coexistence:
        return {"Estar"}
    if regime is Regime.Bistable:
        return {"EK", "EL", "Estar"}
    if regime is Regime.MixedBoundary:
        return {"EL"} if roots._y_wins(p) else {"EK"}
    return {"EK", "EL", "line"}


def check_global_convergence(p: ModelParams, ts: tsm.TimeScale, n_starts: int = 1000,
                             budget: Budget | None = None, tol: float = 1e-8, seed: int = 0,
                             t0: float | None = None, starts: Sequence | None = None,
                             window: int = 10, check_id: str = "global_convergence") -> CheckReport:
    """Random positive starts must reach the limit the regime predicts.

    In the degenerate regime every trajectory must also keep its side of the
    line ``y = h(x)``.
    """
    t_start = time.perf_counter()
    t0 = presets.timescale_from(ts)[1] if t0 is None else t0
    eqs = model.equilibria(p)
    if starts is None:
        xs, ys = _positive_starts(make_rng(seed, check_id), p, n_starts)
        starts = list(zip(xs.tolist(), ys.tolist()))
    allowed = expected_targets(p)
    stop = convergence_stop(eqs, p, tol, window)
    fails, dists, targets, examples = 0, [], Counter(), []
    for s0 in starts:
        traj = simulate(p, ts, t0, s0, budget, stop=stop)
        rep = detect_convergence(traj, eqs, tol, window)
        label = "line" if rep.target.startswith("line point") else rep.target
        targets[label if rep.converged else "none"] += 1
        dists.append(rep.final_distance)
        problem = None
        if not rep.converged:
            problem = traj.reason or "no convergence within budget"
        elif label not in allowed:
            problem = f"converged to {rep.target}"
        elif eqs.line:
            _, x, y, _ = traj.arrays()
            side = y - model.nullcline_h(p, x)
            s = np.sign(side[0]) if abs(side[0]) > LINE_DEADBAND else 0.0
            if s != 0 and np.any(s * side < -LINE_DEADBAND):
                problem = "crossed the line y = h(x)"
        if problem:
            fails += 1
            if len(examples) < 5:
                examples.append({"start": list(s0), "problem": problem, "final": list(traj.final.state)})
    return CheckReport(check_id, "global_convergence", len(starts), fails,
                       tol - max(dists) if dists else None, time.perf_counter() - t_start,
                       details={"timescale": ts.to_dict(), "expected": sorted(allowed),
                                "targets": dict(sorted(targets.items())), "failures": examples})


# -- box exclusion --------------------------------------------------------

def check_box_exclusion(p: ModelParams, n_samples: int = 10_000, mu_set: Sequence[float] = (0.1, 1.0, 10.0),
                        seed: int = 0, check_id: str = "box_exclusion", margin: float = SIGN_MARGIN,
                        edge_fraction: float = 0.2) -> CheckReport:
    """Images of ``B0`` minus ``E*`` must avoid the interior of ``B1``."""
    t_start = time.perf_counter()
    if model.classify_regime(p) not in (Regime.Bistable, Regime.Coexistence):
        raise RegimeMismatch("box exclusion needs an interior equilibrium")
    xs, ys = model.equilibria(p).Estar
    rng = make_rng(seed, check_id)
    n_edge = int(round(n_samples * edge_fraction))

    def off_star(x, y):
        return np.maximum(np.abs(x - xs), np.abs(y - ys)) > margin

    x, y = _rejection(rng, off_star, n_samples - n_edge, xs, ys)
    # half of the edge samples on x = x*, half on y = y*
    e1 = rng.uniform(0.0, ys - margin, n_edge // 2)
    e2 = rng.uniform(0.0, xs - margin, n_edge - n_edge // 2)
    x = np.concatenate([x, np.full_like(e1, xs), e2])
    y = np.concatenate([y, e1, np.full_like(e2, ys)])
    violations, worst = 0, []
    for mu in mu_set:
        xi, yi = model.step_map(p, mu, State(x, y))
        slack = np.maximum(xs - xi, ys - yi)
        violations += int(np.count_nonzero(slack < 0))
        worst.append(float(np.min(slack)))
    return CheckReport(check_id, "box_exclusion", len(x) * len(mu_set), violations, _finite_min(worst),
                       time.perf_counter() - t_start,
                       details={"Estar": [xs, ys], "mu_set": list(mu_set), "edge_samples": n_edge})


# -- boundedness ----------------------------------------------------------

def envelope_along(traj, rate: float, cap: float, z0: float) -> np.ndarray:
    """Boundedness envelope at every sample time of ``traj``.

    ``e_{circle-minus rate}(t, t0)`` is accumulated along the samples: a
    factor ``1/(1 + mu rate)`` after each scattered step and
    ``exp(-rate dt)`` across dense stretches.
    """
    log_e = np.zeros(len(traj.samples))
    acc = 0.0
    for i in range(1, len(traj.samples)):
        prev = traj.samples[i - 1]
        if prev.mode is Mode.Recursion and prev.mu > 0:
            acc -= math.log1p(prev.mu * rate)
        else:
            acc -= rate * (traj.samples[i].t - prev.t)
        log_e[i] = acc
    if z0 == 0:
        return np.zeros_like(log_e)
    e = np.exp(log_e)
    return cap * z0 / (z0 * (1.0 - e) + cap * e)


def check_boundedness(p: ModelParams, timescales: Sequence = ("Z", "quantum", "fig5"), n_starts: int = 100,
                      budget: Budget | None = None, seed: int = 0, tol: float = 1e-9,
                      check_id: str = "boundedness") -> CheckReport:
    t_start = time.perf_counter()
    rng = make_rng(seed, check_id)
    budget = budget or Budget(max_steps=500)
    eqs = model.equilibria(p)
    stop = convergence_stop(eqs, p)
    violations, worst, runs, per_scale = 0, [], 0, {}
    for spec in timescales:
        ts, t0 = presets.timescale_from(spec)
        xs, ys = _positive_starts(rng, p, n_starts)
        bad = 0
        for s0 in zip(xs.tolist(), ys.tolist()):
            traj = simulate(p, ts, t0, s0, budget, stop=stop)
            _, x, y, _ = traj.arrays()
            gap = min(np.min(envelope_along(traj, p.r, p.K, s0[0]) - x),
                      np.min(envelope_along(traj, p.s, p.L, s0[1]) - y))
            worst.append(float(gap))
            bad += int(gap < -tol)
            runs += 1
        violations += bad
        per_scale[ts.kind if isinstance(spec, tsm.TimeScale) else str(spec)] = bad
    return CheckReport(check_id, "boundedness", runs, violations, _finite_min(worst),
                       time.perf_counter() - t_start, details={"violations_by_timescale": per_scale})


# -- root-operator formulas -------------------------------------------------

def _random_params(rng) -> ModelParams:
    r, s = rng.uniform(0.1, 2.0, 2)
    a, b = rng.uniform(0.1, 3.0, 2)
    K, L = rng.uniform(0.5, 3.0, 2)
    return ModelParams(float(r), float(s), float(a), float(b), float(K), float(L))


def _direct_terms(p, mu, x, y, which):
    """Direct-route value ``y^sigma - l(x^sigma)`` and the size of its terms."""
    xs, ys = model.step_map(p, mu, State(x, y))
    if which == "h":
        terms = (ys, 1.0 / p.alpha, xs / (p.alpha * p.K))
        return ys - model.nullcline_h(p, xs), max(abs(t) for t in terms)
    terms = (ys, p.L, p.L * p.beta * xs)
    return ys - model.nullcline_k(p, xs), max(abs(t) for t in terms)


def check_root_formulas(p: ModelParams | None = None, n_samples: int = 10_000, seed: int = 0,
                        rtol: float = 1e-10, mu_max: float = 10.0, state_max: float = 3.0,
                        nodes: Sequence[float] = (0.0, 0.3, 1.0), probe: float = 5.0,
                        check_id: str = "root_formulas") -> CheckReport:
    """Direct versus rational evaluation, and quadratic structure in ``mu``.

    Errors are measured relative to the magnitude of the terms subtracted in
    the direct route, which is what bounds its rounding error.  With ``p``
    omitted every sample draws its own parameters.  Degenerate parameters
    also get ``L_h == L_k`` to 1e-12.
    """
    t_start = time.perf_counter()
    rng = make_rng(seed, check_id)
    n0, n1, n2 = nodes
    # Lagrange weights for extrapolating to the probe graininess
    w = [(probe - n1) * (probe - n2) / ((n0 - n1) * (n0 - n2)),
         (probe - n0) * (probe - n2) / ((n1 - n0) * (n1 - n2)),
         (probe - n0) * (probe - n1) / ((n2 - n0) * (n2 - n1))]
    degenerate = p is not None and model.classify_regime(p) is Regime.DegenerateLine
    bad = Counter()
    worst = math.inf
    for _ in range(n_samples):
        q = p if p is not None else _random_params(rng)
        mu = float(rng.uniform(0.0, mu_max))
        x, y = (float(v) for v in rng.uniform(0.0, state_max, 2))
        evals = {"h": roots.eval_Lh(q, mu, State(x, y)), "k": roots.eval_Lk(q, mu, State(x, y))}
        for which, ev in evals.items():
            scale_factor = q.alpha if which == "h" else 1.0
            direct, scale = _direct_terms(q, mu, x, y, which)
            err = abs(direct - ev.value) / scale
            worst = min(worst, rtol - err)
            if not err <= rtol:
                bad[f"agreement_{which}"] += 1
            # numerator through the direct route at the nodes and the probe
            nums, scales = [], []
            for m in (*nodes, probe):
                d, sc = _direct_terms(q, m, x, y, which)
                den = roots.denominator(q, m, x, y) * scale_factor
                nums.append(d * den)
                scales.append(sc * den)
            predicted = sum(wi * ni for wi, ni in zip(w, nums[:3]))
            numer = roots.numerator_h if which == "h" else roots.numerator_k
            ref = max(scales) * sum(abs(wi) for wi in w)
            for name, target in (("interpolation", nums[3]), ("coefficients", numer(q, probe, x, y))):
                e = abs(predicted - target) / ref
                worst = min(worst, rtol - e)
                if not e <= rtol:
                    bad[f"{name}_{which}"] += 1
        if degenerate:
            lh, lk = evals["h"].value, evals["k"].value
            e = abs(lh - lk) / max(1.0, abs(lh))
            if not e <= 1e-12:
                bad["degenerate_identity"] += 1
    return CheckReport(check_id, "root_formulas", n_samples, sum(bad.values()), worst,
                       time.perf_counter() - t_start,
                       details={"failures": dict(sorted(bad.items())), "random_params": p is None,
                                "degenerate_identity_checked": degenerate})


# -- single-species closed form ---------------------------------------------

def check_logistic(p: ModelParams, timescales: Sequence = ("Z", "R"), n_starts: int = 20, steps: int = 50,
                   horizon: float = 50.0, seed: int = 0, check_id: str = "logistic") -> CheckReport:
    """Single-species runs against the closed-form solution.

    Purely discrete scales run ``steps`` steps at relative tolerance 1e-9;
    scales with dense parts run to ``t0 + horizon`` at 1e-6.
    """
    t_start = time.perf_counter()
    rng = make_rng(seed, check_id)
    violations, worst, runs, per_scale = 0, [], 0, {}
    for spec in timescales:
        ts, t0 = presets.timescale_from(spec)
        has_dense = any(isinstance(e, tsm.Segment) for e in tsm.grid(ts, t0, max_points=8))
        tol = 1e-6 if has_dense else 1e-9
        budget = Budget(horizon=t0 + horizon) if has_dense else Budget(max_steps=steps)
        bad = 0
        for species in ("x", "y"):
            rate, cap = (p.r, p.K) if species == "x" else (p.s, p.L)
            for z0 in rng.uniform(0.0, 2.0 * cap, n_starts).tolist():
                s0 = (z0, 0.0) if species == "x" else (0.0, z0)
                traj = simulate(p, ts, t0, s0, budget)
                err = 0.0
                for smp in traj.samples:
                    z = smp.state.x if species == "x" else smp.state.y
                    zc = model.logistic_closed_form(rate, cap, ts, t0, z0, smp.t)
                    err = max(err, abs(z - zc) / abs(zc))
                worst.append(tol - err)
                bad += int(not err <= tol)
                runs += 1
        violations += bad
        per_scale[str(spec) if not isinstance(spec, tsm.TimeScale) else ts.kind] = {"tol": tol, "violations": bad}
    return CheckReport(check_id, "logistic", runs, violations, _finite_min(worst),
                       time.perf_counter() - t_start, details={"by_timescale": per_scale})


# -- exponential identities -------------------------------------------------

def _time_pool(ts, t0, span=40.0, max_points=30):
    try:
        entries = tsm.grid(ts, t0, horizon=t0 + span, max_points=max_points)
    except tsm.BudgetExceeded as exc:
        entries = exc.partial
    return entries


def _draw_time(rng, entries):
    e = entries[int(rng.integers(len(entries)))]
    if isinstance(e, tsm.Point):
        return e.t
    return float(rng.uniform(e.a, e.b))


def _max_mu(ts, a, b):
    m = 0.0
    for e in ts.walk(a):
        start = e.t if isinstance(e, tsm.Point) else e.a
        if start >= b:
            break
        m = max(m, e.mu if isinstance(e, tsm.Point) else (e.mu_end if e.b < b else 0.0))
    return m


def check_exp_identities(timescales: Sequence = ("Z", "quantum", "fig5", "R"), n_samples: int = 300,
                         seed: int = 0, rtol: float = 1e-12,
                         check_id: str = "exp_identities") -> CheckReport:
    """Semigroup and reciprocal identities, and the two-sided exponential
    sandwich ``1 - p(t - t0) <= e_{-p}(t, t0) <= exp(-p(t - t0)) <= exp(p(t - t0))``
    for ``p > 0`` with ``-p`` positively regressive."""
    t_start = time.perf_counter()
    rng = make_rng(seed, check_id)
    bad = Counter()
    worst = math.inf
    for spec in timescales:
        ts, t0 = presets.timescale_from(spec)
        pool = _time_pool(ts, t0)
        for _ in range(n_samples):
            r_, s_, t_ = sorted(_draw_time(rng, pool) for _ in range(3))
            p = float(rng.uniform(0.05, 2.0))
            ts_ = tsm.exp_ts(ts, p, t_, s_)
            sr = tsm.exp_ts(ts, p, s_, r_)
            tr = tsm.exp_ts(ts, p, t_, r_)
            e = abs(ts_ * sr - tr) / abs(tr)
            worst = min(worst, rtol - e)
            if not e <= rtol:
                bad[f"semigroup_{spec}"] += 1
            # stable circle-minus form, and the literal formula through circle_minus
            for form, rate in (("", tsm.CircleMinus(p)), ("_literal", lambda mu: tsm.circle_minus(p, mu))):
                inv = tsm.exp_ts(ts, rate, t_, r_)
                e = abs(inv * tr - 1.0)
                worst = min(worst, rtol - e)
                if not e <= rtol:
                    bad[f"reciprocal{form}_{spec}"] += 1
            # sandwich: choose p so that mu p < 1 on [r_, t_)
            m = _max_mu(ts, r_, t_)
            q = float(rng.uniform(0.0, 1.0)) * (0.99 / m if m > 0 else 2.0)
            e_neg = tsm.exp_ts(ts, -q, t_, r_)
            integral = q * (t_ - r_)
            slack = min(e_neg - (1.0 - integral), math.exp(-integral) - e_neg,
                        math.exp(integral) - math.exp(-integral))
            allowance = rtol * max(1.0, abs(e_neg))
            worst = min(worst, slack + allowance)
            if slack < -allowance:
                bad[f"sandwich_{spec}"] += 1
    return CheckReport(check_id, "exp_identities", n_samples * len(timescales), sum(bad.values()), worst,
                       time.perf_counter() - t_start, details={"failures": dict(sorted(bad.items()))})


# -- suites -----------------------------------------------------------------

CHECKS = {
    "sign_lemmas": check_sign_lemmas,
    "invariance": check_invariance,
    "global_convergence": check_global_convergence,
    "box_exclusion": check_box_exclusion,
    "boundedness": check_boundedness,
    "root_formulas": check_root_formulas,
    "logistic": check_logistic,
    "exp_identities": check_exp_identities,
}

# option name in a suite config -> converter
_CONVERT = {
    "params": lambda v: None if v is None else presets.params_from(v),
    "p": lambda v: None if v is None else presets.params_from(v),
    "ts": lambda v: presets.timescale_from(v)[0],
    "budget": lambda v: None if v is None else Budget.from_dict(v),
    "mu_set": lambda v: tuple(float(m) for m in v),
    "timescales": lambda v: tuple(v),
    "starts": lambda v: [tuple(float(c) for c in s) for s in v],
}
_ALIASES = {"params": "p", "timescale": "ts", "region": "region_id"}


def _build_call(spec: dict, seed: int):
    if not isinstance(spec, dict):
        raise ConfigInvalid(f"check entries must be objects, got {spec!r}")
    name = spec.get("check")
    if name not in CHECKS:
        raise ConfigInvalid(f"unknown check {name!r}; known: {sorted(CHECKS)}")
    check_id = spec.get("id", name)
    fn = CHECKS[name]
    accepted = set(inspect.signature(fn).parameters) - {"seed", "check_id"}
    kwargs = {}
    for key, value in spec.items():
        if key in ("check", "id"):
            continue
        arg = _ALIASES.get(key, key)
        if arg not in accepted:
            raise ConfigInvalid(f"check {check_id!r}: unknown option {key!r}")
        try:
            kwargs[arg] = _CONVERT[arg](value) if arg in _CONVERT else value
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigInvalid(f"check {check_id!r}: bad {key!r}: {exc}") from None
    if "ts" in kwargs and "t0" not in kwargs:
        kwargs["t0"] = presets.timescale_from(spec["timescale"])[1]
    return fn, dict(kwargs, seed=seed, check_id=check_id)


def _run_one(job):
    fn, kwargs = job
    try:
        return fn(**kwargs)
    except RegimeMismatch as exc:
        return CheckReport(kwargs["check_id"], fn.__name__.removeprefix("check_"), 0, 1, None, 0.0,
                           details={"error": f"RegimeMismatch: {exc}"})


def load_suite(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"{path}: {exc}") from None


def run_suite(config: dict, workers: int = 1, seed: int | None = None) -> list[CheckReport]:
    """Run every check of a suite config, in config order.

    ``config`` is ``{"seed": int, "checks": [{"check": name, "id": ..., options}]}``.
    A ``seed`` argument overrides the config's.
    """
    if not isinstance(config, dict) or not isinstance(config.get("checks", []), list):
        raise ConfigInvalid("suite config must be an object with a 'checks' list")
    unknown = set(config) - {"seed", "checks", "description"}
    if unknown:
        raise ConfigInvalid(f"unknown suite keys: {sorted(unknown)}")
    seed = int(config.get("seed", 0)) if seed is None else seed
    jobs = [_build_call(spec, seed) for spec in config.get("checks", [])]
    ids = [kw["check_id"] for _, kw in jobs]
    if len(set(ids)) != len(ids):
        raise ConfigInvalid("check ids must be unique")
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_one, jobs))
    return [_run_one(job) for job in jobs]


def reports_to_json(reports: Sequence[CheckReport], elapsed: bool = True) -> str:
    body = {"passed": all(r.passed for r in reports),
            "reports": [r.to_dict(elapsed) for r in reports]}
    return json.dumps(body, indent=2, default=_json_default)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    raise TypeError(f"not serializable: {obj!r}")


def reports_to_table(reports: Sequence[CheckReport]) -> str:
    rows = [("check_id", "check", "samples", "violations", "worst_margin", "elapsed_s", "verdict")]
    for r in reports:
        wm = "-" if r.worst_margin is None else f"{r.worst_margin:.3e}"
        rows.append((r.check_id, r.check, str(r.samples), str(r.violations), wm, f"{r.elapsed:.2f}", r.verdict))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows)
