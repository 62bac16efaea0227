"""Command-line front end: classify | simulate | phaseplane | verify.

Exit codes: 0 ok, 1 configuration error, 2 budget exceeded, 3 verification
failure.  CSV numbers carry 17 significant digits; JSON floats use Python's
shortest round-trip representation.  Every command takes ``--seed`` (default
0); only ``verify`` draws random numbers.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import os
import sys
from importlib import resources

import numpy as np

from . import model, presets, roots, simulator, verifier
from . import timescale as tsm
from .model import ModelParams
from .mutations import MUTATIONS, mutated

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET, EXIT_VERIFY = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    return format(float(v) + 0.0, ".17g")  # + 0.0 folds -0 into 0


def _read_json_arg(text: str):
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(text)


def parse_params(text: str) -> ModelParams:
    """Preset name, JSON file, JSON object, or ``r=..,s=..,alpha=..`` pairs."""
    try:
        if text in presets.PARAMS:
            return presets.PARAMS[text]
        if os.path.isfile(text) or text.lstrip().startswith("{"):
            return ModelParams.from_dict(_read_json_arg(text))
        pairs = dict(item.split("=", 1) for item in text.replace(" ", ",").split(",") if item)
        return ModelParams.from_dict({k.strip(): float(v) for k, v in pairs.items()})
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"bad --params {text!r}: {exc}") from None


def parse_timescale(text: str) -> tuple[tsm.TimeScale, float]:
    """Preset name, JSON file/object, or ``kind:k=v,...`` (e.g. ``quantum:q=2``)."""
    try:
        if text in presets.TIMESCALES:
            return presets.TIMESCALES[text]
        if os.path.isfile(text) or text.lstrip().startswith("{"):
            return presets.timescale_from(_read_json_arg(text))
        kind, _, rest = text.partition(":")
        d = {"kind": kind.strip()}
        for item in filter(None, rest.split(",")):
            k, v = item.split("=", 1)
            d[k.strip()] = float(v)
        return presets.timescale_from(d)
    except (ValueError, TypeError, KeyError, json.JSONDecodeError) as exc:
        raise ConfigError(f"bad --timescale {text!r}: {exc}") from None


def _pair(v):
    return [float(v[0]), float(v[1])]


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


# -- classify ----------------------------------------------------------------

def cmd_classify(args) -> int:
    p = parse_params(args.params)
    regime = model.classify_regime(p)
    eqs = model.equilibria(p)
    out = {
        "regime": regime.value,
        "E0": _pair(eqs.E0),
        "EK": _pair(eqs.EK),
        "EL": _pair(eqs.EL),
        "Estar": None if eqs.Estar is None else _pair(eqs.Estar),
        "line": eqs.line,
        "feasibility": {"alphaL_minus_1": p.aL - 1.0, "betaK_minus_1": p.bK - 1.0,
                        "Estar_feasible": eqs.Estar is not None},
        "params": p.to_dict(),
    }
    with _output(args.out) as fh:
        fh.write(json.dumps(out) + "\n")
    return EXIT_OK


# -- simulate ----------------------------------------------------------------

def _scenario(args) -> dict:
    sc = {}
    if args.scenario:
        try:
            with open(args.scenario, encoding="utf-8") as fh:
                sc = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"scenario file not found: {args.scenario}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"scenario {args.scenario}: {exc}") from None
        unknown = set(sc) - {"timescale", "params", "t0", "x0", "y0", "initial", "budget", "tol"}
        if unknown:
            raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
    try:
        p = parse_params(args.params) if args.params else presets.params_from(sc["params"])
        if args.timescale:
            ts, t0 = parse_timescale(args.timescale)
        else:
            ts, t0 = presets.timescale_from(sc.get("timescale", "Z"))
        t0 = float(args.t0 if args.t0 is not None else sc.get("t0", t0))
        if args.start:
            starts = [tuple(float(c) for c in s.split(",")) for s in args.start]
        elif "initial" in sc:
            starts = [tuple(float(c) for c in s) for s in sc["initial"]]
        else:
            starts = [(float(sc["x0"]), float(sc["y0"]))]
        b = sc.get("budget", {})
        budget = simulator.Budget.from_dict({"max_steps": b} if isinstance(b, (int, float)) else b)
        if args.budget is not None:
            budget = simulator.Budget(args.budget, budget.dense_time, budget.horizon)
        if args.horizon is not None:
            budget = simulator.Budget(budget.max_steps, budget.dense_time, args.horizon)
        tol = float(args.tol if args.tol is not None else sc.get("tol", 1e-9))
    except KeyError as exc:
        raise ConfigError(f"scenario is missing {exc}") from None
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    if any(len(s) != 2 or min(s) < 0 for s in starts):
        raise ConfigError("initial states must be nonnegative pairs")
    if not ts.contains(t0):
        raise ConfigError(f"t0={t0!r} is not a point of the time scale")
    return {"params": p, "ts": ts, "t0": t0, "starts": starts, "budget": budget, "tol": tol}


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    p = sc["params"]
    eqs = model.equilibria(p)
    reports = []
    truncated = False
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x", "y", "mu", "mode", "region", "run"])
        for run, s0 in enumerate(sc["starts"]):
            traj = simulator.simulate(p, sc["ts"], sc["t0"], s0, sc["budget"], sc["tol"])
            for smp in traj.samples:
                region = roots.classify_region(p, smp.state)
                w.writerow([fmt(smp.t), fmt(smp.state.x), fmt(smp.state.y), fmt(smp.mu),
                            smp.mode.value, region.name, run])
            rep = simulator.detect_convergence(traj, eqs)
            reports.append({"run": run, "start": list(s0), **rep.to_dict(),
                            "samples": len(traj), "truncated": traj.truncated, "reason": traj.reason})
            truncated |= traj.truncated
    body = json.dumps({"regime": model.classify_regime(p).value, "runs": reports})
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(body + "\n")
    else:
        (sys.stdout if args.out not in (None, "-") else sys.stderr).write(body + "\n")
    return EXIT_BUDGET if truncated else EXIT_OK


# -- phaseplane --------------------------------------------------------------

def cmd_phaseplane(args) -> int:
    p = parse_params(args.params)
    try:
        lo, hi = (float(v) for v in args.x_range.split(","))
    except ValueError:
        raise ConfigError(f"bad --x-range {args.x_range!r}") from None
    if not 0 <= lo <= hi or args.n_samples < 1:
        raise ConfigError("need 0 <= x_min <= x_max and n_samples >= 1")
    xg = np.linspace(lo, hi, args.n_samples)
    if args.t:
        if not args.timescale:
            raise ConfigError("--t needs --timescale")
        ts, _ = parse_timescale(args.timescale)
        try:
            rows = [(float(t), tsm.graininess(ts, float(t))) for t in args.t.split(",")]
        except tsm.PointNotInScale as exc:
            raise ConfigError(str(exc)) from None
    else:
        try:
            rows = [(math.nan, float(m)) for m in (args.mu or "0").split(",")]
        except ValueError:
            raise ConfigError(f"bad --mu {args.mu!r}") from None
    if any(not (mu >= 0 and math.isfinite(mu)) for _, mu in rows):
        raise ConfigError("graininess values must be finite and nonnegative")
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "mu", "which", "x", "y"])
        for which, curve in (("h", model.nullcline_h), ("k", model.nullcline_k)):
            for x in xg:
                y = curve(p, float(x))
                if y >= 0:
                    w.writerow(["nan", "nan", which, fmt(x), fmt(y)])
        for t, mu in rows:
            for which in ("h", "k"):
                for x, y in roots.root_curve(p, mu, which, xg):
                    w.writerow([fmt(t), fmt(mu), which, fmt(x), fmt(y)])
    return EXIT_OK


# -- verify ------------------------------------------------------------------

def load_suite_arg(name: str) -> dict:
    if name == "full" and not os.path.exists(name):
        return json.loads(resources.files("tslv").joinpath("suites/full.json").read_text(encoding="utf-8"))
    if not os.path.isfile(name):
        raise ConfigError(f"suite file not found: {name}")
    try:
        return verifier.load_suite(name)
    except verifier.ConfigInvalid as exc:
        raise ConfigError(str(exc)) from None


def cmd_verify(args) -> int:
    config = load_suite_arg(args.suite)
    ctx = mutated(args.mutation) if args.mutation else contextlib.nullcontext()
    try:
        with ctx:
            reports = verifier.run_suite(config, workers=args.workers, seed=args.seed)
    except verifier.ConfigInvalid as exc:
        raise ConfigError(str(exc)) from None
    with _output(args.out) as fh:
        fh.write(verifier.reports_to_json(reports, elapsed=not args.no_elapsed) + "\n")
    if not args.quiet:
        sys.stderr.write(verifier.reports_to_table(reports) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY


# -- entry point -------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors; argparse's own status 2 is taken
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="tslv", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed_default=0):
        sp.add_argument("--seed", type=int, default=seed_default,
                        help="random seed (default 0, or the suite's own seed for verify)")
        sp.add_argument("--out", help="output file (default stdout)")

    c = sub.add_parser("classify", help="regime and equilibria as JSON")
    c.add_argument("--params", required=True, help="preset, JSON file/object or r=..,s=.. pairs")
    common(c)
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("simulate", help="trajectory CSV plus convergence report")
    s.add_argument("scenario", nargs="?", help="scenario JSON file")
    s.add_argument("--params")
    s.add_argument("--timescale", help="preset, JSON file/object or kind:k=v,...")
    s.add_argument("--t0", type=float)
    s.add_argument("--start", action="append", help="initial state x,y (repeatable)")
    s.add_argument("--budget", type=int, help="maximum number of scattered steps")
    s.add_argument("--horizon", type=float)
    s.add_argument("--tol", type=float, help="ODE tolerance on dense stretches")
    s.add_argument("--report", help="convergence report JSON file")
    common(s)
    s.set_defaults(func=cmd_simulate)

    ph = sub.add_parser("phaseplane", help="nullcline and root-curve CSV")
    ph.add_argument("--params", required=True)
    ph.add_argument("--mu", help="comma-separated graininess values")
    ph.add_argument("--timescale")
    ph.add_argument("--t", help="comma-separated time points (with --timescale)")
    ph.add_argument("--x-range", default="0,2")
    ph.add_argument("--n-samples", type=int, default=201)
    common(ph)
    ph.set_defaults(func=cmd_phaseplane)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", nargs="?", default="full", help="suite JSON file, or 'full' for the shipped suite")
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--mutation", choices=sorted(MUTATIONS), help="run against a deliberately broken model")
    v.add_argument("--no-elapsed", action="store_true", help="omit timings (byte-stable reports)")
    v.add_argument("--quiet", action="store_true", help="skip the text table on stderr")
    common(v, seed_default=None)
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"tslv: {exc}\n")
        return EXIT_CONFIG
    except (tsm.PointNotInScale, roots.RegimeMismatch, ValueError) as exc:
        sys.stderr.write(f"tslv: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
