import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tslv import model, presets, roots, verifier
from tslv import timescale as tsm
from tslv.model import State
from tslv.simulator import Budget, Mode, convergence_stop, detect_convergence, simulate

FIG2 = presets.PARAMS["fig2"]
Z, _ = presets.TIMESCALES["Z"]
Q, _ = presets.TIMESCALES["quantum"]
FIG5, _ = presets.TIMESCALES["fig5"]
R, _ = presets.TIMESCALES["R"]


# subnormal starts can underflow to zero in one step, so keep away from them
coord = st.one_of(st.just(0.0), st.floats(1e-6, 5.0))


def run_to_convergence(p, ts, t0, s0, tol=1e-8, max_steps=20_000):
    eqs = model.equilibria(p)
    traj = simulate(p, ts, t0, s0, Budget(max_steps=max_steps), stop=convergence_stop(eqs, p, tol))
    return traj, detect_convergence(traj, eqs, tol)


def test_origin_stays_put():
    traj = simulate(FIG2, FIG5, 1.0, (0.0, 0.0), Budget(horizon=20.0))
    assert all(s.state == (0.0, 0.0) for s in traj.samples)
    assert traj.final.t == 20.0 and not traj.truncated


@pytest.mark.parametrize("start,steps", [((2.0, 1.0), 2), ((0.2, 0.1), 3), ((1.5, 2.0), 5)])
def test_fig2_quantum_enters_omega2_and_converges(start, steps):
    traj, rep = run_to_convergence(FIG2, Q, 1.0, start, tol=1e-6)
    assert rep.converged and rep.target == "EL"
    assert rep.steps_to_invariant_region == steps
    inside = [bool(roots.in_region(FIG2, s.state, "Omega2")) for s in traj.samples]
    first = inside.index(True)
    assert all(inside[first:])


def test_first_step_on_quantum():
    traj = simulate(FIG2, Q, 1.0, (2.0, 1.0), Budget(max_steps=1))
    assert traj.samples[1].t == 2.0
    assert traj.samples[1].state.x == 1.0
    assert traj.samples[1].state.y == pytest.approx(1.3 / 1.48, rel=1e-15)


def test_reals_single_species_is_logistic():
    p = FIG2
    traj = simulate(p, R, 0.0, (0.1, 0.0), Budget(horizon=12.0), tol=1e-11)
    assert all(s.mode is Mode.DenseODE for s in traj.samples)
    assert traj.final.t == 12.0 and not traj.truncated
    for s in traj.samples:
        exact = 0.1 / (0.1 + 0.9 * math.exp(-p.r * s.t))
        assert s.state.x == pytest.approx(exact, rel=1e-8)
        assert s.state.y == 0.0


def test_fig5_mixes_modes():
    traj = simulate(FIG2, FIG5, 1.0, (0.4, 0.3), Budget(horizon=9.0))
    t, x, y, mu = traj.arrays()
    assert {s.mode for s in traj.samples} == {Mode.Recursion, Mode.DenseODE}
    assert np.all(np.diff(t) >= 0) and t[-1] == 9.0
    for s in traj.samples:
        assert FIG5.contains(s.t)
        if s.mode is Mode.Recursion:
            assert s.mu == FIG5.mu(s.t)
    # the jump out of t = 1 is the exact step map
    i = next(i for i, s in enumerate(traj.samples) if s.t == 1.0)
    assert traj.samples[i + 1].state == model.step_map(FIG2, 1.0, State(0.4, 0.3))


@settings(max_examples=30)
@given(st.sampled_from(["fig2", "xwins", "bistable", "coexistence", "degenerate"]),
       st.sampled_from(["Z", "quantum", "fig5"]),
       coord, coord)
def test_trajectory_invariants(pname, tname, x0, y0):
    p = presets.PARAMS[pname]
    ts, t0 = presets.TIMESCALES[tname]
    traj = simulate(p, ts, t0, (x0, y0), Budget(max_steps=60))
    t, x, y, _ = traj.arrays()
    assert np.all(np.diff(t) >= 0)
    assert np.all(x >= 0) and np.all(y >= 0)
    assert np.all((x == 0) == (x0 == 0)) and np.all((y == 0) == (y0 == 0))
    env_x = verifier.envelope_along(traj, p.r, p.K, x0)
    env_y = verifier.envelope_along(traj, p.s, p.L, y0)
    assert np.all(x <= env_x * (1 + 1e-9) + 1e-12)
    assert np.all(y <= env_y * (1 + 1e-9) + 1e-12)


def test_envelope_along_matches_closed_form():
    traj = simulate(FIG2, Q, 1.0, (2.0, 1.0), Budget(max_steps=12))
    env = verifier.envelope_along(traj, FIG2.r, FIG2.K, 2.0)
    for s, e in zip(traj.samples, env):
        assert e == pytest.approx(model.boundedness_envelope(FIG2.r, FIG2.K, Q, 1.0, 2.0, s.t), rel=1e-12)


def test_coexistence_on_Z():
    p = presets.PARAMS["coexistence"]
    _, rep = run_to_convergence(p, Z, 0.0, (0.5, 0.5))
    assert rep.converged and rep.target == "Estar"


def test_bistable_from_R1_goes_to_EL():
    p = presets.PARAMS["bistable"]
    assert roots.classify_region(p, State(0.1, 0.4)).label is roots.RegionLabel.R1
    traj, rep = run_to_convergence(p, Z, 0.0, (0.1, 0.4))
    assert rep.converged and rep.target == "EL"
    assert roots.classify_region(p, traj.final.state).invariant == "R2T"
    assert rep.steps_to_invariant_region is not None


def test_degenerate_converges_to_line():
    p = presets.PARAMS["degenerate"]
    _, rep = run_to_convergence(p, Z, 0.0, (1.0, 0.3))
    assert rep.converged and rep.target.startswith("line point")
    assert rep.steps_to_invariant_region is None


def test_budget_truncation():
    traj = simulate(FIG2, Z, 0.0, (0.5, 0.5), Budget(max_steps=5, horizon=100.0))
    assert traj.truncated and "max_steps" in traj.reason
    assert traj.recursion_steps() == 5
    free = simulate(FIG2, Z, 0.0, (0.5, 0.5), Budget(max_steps=5))
    assert not free.truncated and len(free) == 6
    dense = simulate(FIG2, R, 0.0, (0.5, 0.5), Budget(dense_time=3.0, horizon=10.0))
    assert dense.truncated and dense.final.t == 3.0


def test_time_overflow_is_truncation():
    traj = simulate(FIG2, tsm.Quantum(2.0, 1.0), 2.0**1000, (0.5, 0.5), Budget(max_steps=100))
    assert traj.truncated and "overflow" in traj.reason


def test_horizon_stops_exactly():
    traj = simulate(FIG2, Z, 0.0, (0.5, 0.5), Budget(horizon=7.0))
    assert traj.final.t == 7.0 and len(traj) == 8 and not traj.truncated


def test_bad_inputs():
    with pytest.raises(ValueError):
        simulate(FIG2, Z, 0.0, (-1.0, 0.5))
    with pytest.raises(tsm.PointNotInScale):
        simulate(FIG2, Z, 0.5, (1.0, 0.5))
    with pytest.raises(ValueError):
        simulate(FIG2, Z, 3.0, (1.0, 0.5), Budget(horizon=1.0))
    with pytest.raises(ValueError):
        Budget.from_dict({"steps": 3})


def test_detect_needs_full_window():
    traj = simulate(FIG2, Z, 0.0, (0.0, 1.0), Budget(max_steps=3))
    rep = detect_convergence(traj, model.equilibria(FIG2))
    assert not rep.converged and rep.target == "EL" and rep.final_distance == 0.0
