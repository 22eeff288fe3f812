import importlib
import math

import numpy as np
import pytest

from lindblad_dimer import (
    DimerParams,
    LifetimeRecord,
    NoCrossingError,
    build_liouvillian,
    crossing_time,
    evolve_ode,
    golden_section,
    grid_scan,
    lifetimes,
    make_dimer,
    optimal_lambda,
    pi_delta0,
    piecewise_exponential_check,
    survival_curve,
)
from lindblad_dimer.model import DensityMatrix

lifetimes_module = importlib.import_module("lindblad_dimer.lifetimes")

AXIS = np.round(np.arange(0, 3 + 1e-9, 0.05), 10)


@pytest.fixture(scope="module")
def full_grid():
    return grid_scan(AXIS, AXIS, v=1.0, gamma=1.0, jobs=4)


def test_crossing_of_pure_exponential():
    assert crossing_time(lambda t: np.exp(-np.asarray(t)), math.exp(-1)) == pytest.approx(1.0, abs=1e-12)


def test_memoryless_decay_has_equal_stage_lifetimes():
    pi = lambda t: np.exp(-2 * np.asarray(t))
    t1 = crossing_time(pi, math.exp(-1), 0.0, 0.5)
    t2 = crossing_time(pi, math.exp(-2), t1, 0.5)
    t3 = crossing_time(pi, math.exp(-3), t2, 0.5)
    np.testing.assert_allclose([t1, t2 - t1, t3 - t2], 0.5, atol=1e-12)


def test_crossing_picks_the_first_sign_change():
    # dips below 0.5 near t = 1, recovers, and falls for good later
    pi = lambda t: 0.75 + 0.3 * np.cos(np.pi * np.asarray(t)) - 0.05 * np.asarray(t)
    first = crossing_time(pi, 0.5, 0.0, t_hint=4.0, resolution=1e-3)
    assert first < 1.0
    assert pi(first) == pytest.approx(0.5, abs=1e-9)


def test_crossing_accepts_scalar_only_callables():
    assert crossing_time(lambda t: math.exp(-float(t)), math.exp(-2), 0.0, 1.0) == pytest.approx(2.0, abs=1e-12)


def test_crossing_error_paths():
    with pytest.raises(NoCrossingError) as info:
        crossing_time(lambda t: np.ones_like(np.asarray(t, dtype=float)), 0.5)
    assert info.value.horizon == 1e4
    with pytest.raises(ValueError):
        crossing_time(lambda t: np.exp(-np.asarray(t)), 1.5)
    with pytest.raises(ValueError):
        crossing_time(lambda t: np.exp(-np.asarray(t)), 0.5, t_start=2.0)


def test_crossings_on_closed_form_and_trajectory_agree():
    curve = survival_curve(make_dimer(DimerParams(delta=0)), 0.0)
    closed = lambda t: pi_delta0(1.0, 1.0, t)
    prev_a = prev_b = 0.0
    for s in (1, 2, 3):
        a = crossing_time(closed, math.exp(-s), prev_a, 1.0, 1e-3)
        b = crossing_time(curve, math.exp(-s), prev_b, 1.0, 1e-3)
        assert abs(a - b) < 1e-6
        prev_a, prev_b = a, b


def test_record_consistency():
    rec = lifetimes(DimerParams(delta=1.5, lam=0.5))
    assert rec.t1 == rec.tau1
    assert rec.t2 == pytest.approx(rec.tau1 + rec.tau2, abs=1e-14)
    assert rec.t3 == pytest.approx(rec.tau1 + rec.tau2 + rec.tau3, abs=1e-14)
    curve = survival_curve(make_dimer(DimerParams(delta=1.5)), 0.5)
    for s, t in enumerate((rec.t1, rec.t2, rec.t3), start=1):
        assert abs(curve(t) - math.exp(-s)) < 1e-9
    assert all(x > 0 and math.isfinite(x) for x in rec.taus)
    assert rec.status == "ok"


@pytest.mark.parametrize("params", [DimerParams(delta=1.5, lam=0.5), DimerParams(delta=0.4, lam=3.0, gamma=0.6)])
def test_crossings_confirmed_by_ode(params):
    rec = lifetimes(params)
    liou = build_liouvillian(make_dimer(params), params.lam)
    ts = np.array([rec.t1, rec.t2, rec.t3])
    traj = evolve_ode(liou, DensityMatrix.localized(2, 0), ts[-1], times=ts)
    np.testing.assert_allclose(traj.survival, np.exp(-np.arange(1, 4)), atol=1e-8)


def test_tau2_minimum_near_half():
    lams = [0, 0.25, 0.5, 0.75, 1, 2]
    tau2 = [lifetimes(DimerParams(delta=1.5, lam=x)).tau2 for x in lams]
    i = int(np.argmin(tau2))
    assert lams[i] == 0.5
    assert tau2[i] < tau2[0]


def test_tau1_not_enhanced_by_dephasing():
    tau1 = [lifetimes(DimerParams(delta=1.5, lam=x)).tau1 for x in np.linspace(0, 2, 21)]
    assert all(b >= a for a, b in zip(tau1, tau1[1:]))


def test_t3_on_closed_form():
    rec = lifetimes(DimerParams(delta=0, lam=0))
    assert abs(pi_delta0(1.0, 1.0, rec.t3) - math.exp(-3)) < 1e-9


def test_lifetimes_without_trap_report_no_crossing():
    with pytest.raises(NoCrossingError) as info:
        lifetimes(DimerParams(gamma=0.0))
    assert info.value.params == DimerParams(gamma=0.0)


def test_lifetimes_at_exceptional_point_use_ode():
    rec = lifetimes(DimerParams(delta=0, gamma=2.0))
    exact = lambda t: np.exp(-2 * t) * ((1 + t) ** 2 + t**2)
    assert exact(rec.t1) == pytest.approx(math.exp(-1), abs=1e-8)


def test_smoke_grid():
    grid = grid_scan([0, 1], [0, 1])
    assert len(grid.records) == 2 and all(len(row) == 2 for row in grid.records)
    assert all(r.status == "ok" and all(math.isfinite(x) for x in r.taus) for r in grid.rows())
    assert [(r.delta, r.lam) for r in grid.rows()] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert grid.field("tau2").shape == (2, 2)


def test_grid_marks_failed_points():
    grid = grid_scan([0.0, 0.5], [0.0], gamma=0.0)
    assert [r.status for r in grid.rows()] == ["no_crossing", "no_crossing"]
    assert all(math.isnan(r.tau1) for r in grid.rows())


@pytest.mark.parametrize("bad", [[], [0.5, 0.1], [-1.0, 0.0]])
def test_grid_axis_validation(bad):
    with pytest.raises(ValueError):
        grid_scan(bad, [0.0])


def test_grid_parallel_equals_serial():
    lams, deltas = [0, 0.3, 1.1, 4.0], [0, 0.7, 2.2]
    assert grid_scan(lams, deltas, jobs=1) == grid_scan(lams, deltas, jobs=3)


def test_monotone_in_offset_except_tau3_at_small_lambda(full_grid):
    for name in ("tau1", "tau2", "tau_inf", "tau3"):
        values = full_grid.field(name)
        increasing = np.all(np.diff(values, axis=0) >= -1e-9, axis=0)
        if name == "tau3":
            small = AXIS <= 0.1
            assert np.all(increasing[~small])
            assert not np.any(increasing[small])
        else:
            assert np.all(increasing), name


def test_lagoon_on_full_grid(full_grid):
    j = int(np.nonzero(AXIS == 0.05)[0][0])
    tau3 = full_grid.field("tau3")[:, j]
    maxima = [AXIS[i] for i in range(1, len(AXIS) - 1) if tau3[i] > tau3[i - 1] and tau3[i] > tau3[i + 1]]
    assert any(0.55 <= d <= 0.85 for d in maxima)


def test_zeno_tail_on_full_grid(full_grid):
    # only lam = 3 is on the full grid, so extend the tail separately
    for d in AXIS[::10]:
        recs = [lifetimes(DimerParams(delta=d, lam=x)) for x in (3.0, 5.0, 7.5, 10.0)]
        for name in ("tau2", "tau3", "tau_inf"):
            seq = [getattr(r, name) for r in recs]
            assert all(b > a for a, b in zip(seq, seq[1:]))
    assert np.all(np.diff(full_grid.field("tau2")[:, -3:], axis=1) > 0)


def test_tau1_shallow_minimum_at_large_offset(full_grid):
    tau1 = full_grid.field("tau1")
    found = []
    for i, d in enumerate(AXIS):
        if 1.8 <= d <= 3.0:
            j = int(np.argmin(tau1[i]))
            if 0 < j < len(AXIS) - 1:
                found.append(d)
    assert found


def test_golden_section_on_parabola():
    x, fx = golden_section(lambda x: (x - 0.37) ** 2 + 1, 0.0, 1.0, tol=1e-6)
    assert x == pytest.approx(0.37, abs=1e-6)
    assert fx == pytest.approx(1.0)


def test_optimal_lambda_for_tau2():
    opt = optimal_lambda(1.5, 1.0, 1.0, which="tau2")
    assert opt.interior
    assert 0.3 <= opt.lambda_star <= 0.7


def test_optimal_lambda_small_offset():
    assert optimal_lambda(0.1, 1.0, 1.0, which="tau_inf").interior
    tau2 = optimal_lambda(0.1, 1.0, 1.0, which="tau2")
    assert not tau2.interior and tau2.lambda_star == 0.0


def test_minima_colocated():
    stars = [optimal_lambda(1.5, which=w).lambda_star for w in ("tau2", "tau3", "tau_inf")]
    assert max(stars) - min(stars) < 0.2


def test_optimal_lambda_mfpt_target():
    opt = optimal_lambda(1.5, which="mfpt", lam_max=2.0)
    assert opt.interior and 0 < opt.lambda_star < 2


def test_optimal_lambda_flags_multimodality(monkeypatch):
    double_well = lambda *a, **k: (lambda x: (x - 2) ** 2 * (x - 6) ** 2 + 0.1 * x)
    monkeypatch.setattr(lifetimes_module, "lifetime_objective", double_well)
    opt = optimal_lambda(1.0, which="tau2")
    assert opt.multimodal and opt.interior
    assert opt.lambda_star == pytest.approx(2.0, abs=0.05)


def test_optimal_lambda_rejects_unknown_selector():
    with pytest.raises(ValueError):
        optimal_lambda(1.0, which="tau4")


def test_piecewise_exponential_check():
    assert piecewise_exponential_check([0.7, 0.7, 0.7, 0.7]) == 0.0
    assert piecewise_exponential_check([1.0, 2.0]) == pytest.approx(0.5)
    assert piecewise_exponential_check(lifetimes(DimerParams(delta=1.5, lam=1.0))) < 0.15
    coherent = piecewise_exponential_check(lifetimes(DimerParams(delta=1.5, lam=0.05)))
    assert coherent > 0.02


def test_failed_record_is_nan():
    rec = LifetimeRecord.failed(DimerParams(), "degenerate")
    assert rec.status == "degenerate" and all(math.isnan(x) for x in rec.taus)
