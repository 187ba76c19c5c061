import json
import math

import numpy as np
import pytest

from boussinesq1d.certificate import (
    JSON_SCHEMA,
    SATURATION,
    blowup_bound_report,
    certificate_document,
    check_inequalities,
    induction_holds,
    recursion_iterate,
    render_json,
    schedule,
    track,
)
from boussinesq1d.fields import InitialData, build_rho0, discretize, find_xn
from boussinesq1d.solver import StepControl, advance

from conftest import blowup_labels


@pytest.fixture(scope="module")
def trace(blowup_run, blowup_data):
    return track(blowup_run, blowup_data.rho0, n_max=8)


def test_schedule():
    t, tilde = schedule(5)
    assert t[0] == 1.0
    assert t[4] == 1.9375
    assert np.allclose(tilde, t + 2.0 ** -(np.arange(1, 6) + 1))
    assert schedule(60)[0][-1] == pytest.approx(2.0, abs=1e-15)


def test_track_without_flow_is_static():
    rho0 = build_rho0()
    labels = blowup_labels(rho0, 4)
    traj = advance(discretize(InitialData.zero(), 200, extra_labels=labels), StepControl(t_end=0.5, dt_max=0.1), tracked=labels)
    tr = track(traj, rho0, n_max=4)
    assert np.all(tr.Phi == np.array(labels[:4])[:, None])
    assert np.all(tr.psi == tr.psi[:, :1])
    assert np.all(tr.Omega == 0)


def test_track_requires_tracked_labels(m10_data):
    traj = advance(discretize(m10_data, 100), StepControl(t_end=0.01))
    with pytest.raises(ValueError):
        track(traj, m10_data.rho0, n_max=2)
    with pytest.raises(ValueError):
        track(traj, m10_data.rho0, n_max=0)


def test_initial_omega_exceeds_twenty(trace):
    assert np.all(trace.Omega[:, 0] > 20)
    assert trace.x[0] == find_xn(build_rho0(), 1)
    assert np.allclose(trace.rho, 0.5 + 2.0 ** -np.arange(1, 9), atol=1e-12)


def test_psi_nondecreasing_and_ordered(trace):
    keep = trace.t < 5
    assert np.all(np.diff(trace.psi[:, keep], axis=1) >= 0)
    assert np.all(np.diff(trace.psi[:, keep], axis=0) >= 0)
    assert np.all(trace.psi >= 0)


def test_psi_at_interpolates_snapshots(trace):
    for k in (0, 5, len(trace.t) - 1):
        assert trace.psi_at(3, trace.t[k]) == pytest.approx(trace.psi[2, k], abs=1e-12)
    assert math.isnan(trace.psi_at(1, trace.t[-1] + 1.0))


def test_dpsi_dt_matches_omega_under_refinement(m10_data):
    xs = [find_xn(m10_data.rho0, n) for n in (1, 2)] + [0.5]
    errs = []
    for N, dt in ((1000, 2e-3), (2000, 1e-3)):
        traj = advance(discretize(m10_data, N, extra_labels=xs), StepControl(t_end=0.2, dt_max=dt, cfl=1.0), tracked=xs)
        tr = track(traj, m10_data.rho0, n_max=2)
        d = np.gradient(tr.psi[0], tr.t, edge_order=2)
        errs.append(np.abs(d - tr.Omega[0])[1:-1].max())
    assert errs[1] < errs[0] / 3


def test_inequality_report(trace):
    rep = check_inequalities(trace)
    assert min(rep.omega_min) >= -1e-6
    assert all(v >= -0.1 for v in rep.growth_vs_density_min)
    assert all(v >= -0.1 for v in rep.growth_vs_previous_min[1:5])
    assert rep.growth_vs_previous_min[0] is None
    # the run is flagged long before t_1 = 1, so schedule-based checks have no data
    assert all(v is None for v in rep.growth_after_schedule_min)
    assert all(v is None for v in rep.schedule_step)
    assert all(rep.passed(5).values())


def test_omega1_at_least_sixteen_until_flag(trace):
    window = trace.t <= min(1.0, trace.flag_time)
    assert np.all(trace.Omega[0, window] >= 16)


def test_recursion_values():
    rec = recursion_iterate(9, 50)
    assert rec[1].value == pytest.approx(math.e**3 + 8, rel=1e-12)
    assert induction_holds(rec) is True
    assert all(s.at_least(3 * s.n + 6) for s in rec)
    vals = [s.value for s in rec]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert rec[-1].saturated and rec[-1].value == SATURATION


def test_recursion_hypothesis_failure():
    rec = recursion_iterate(0, 5)
    assert rec[1].value == pytest.approx(math.exp(-6) - 1, rel=1e-12)
    assert induction_holds(rec) is None


def test_recursion_matches_direct_evaluation_below_saturation():
    a = 9.0
    rec = recursion_iterate(a, 2)
    assert rec[1].value == pytest.approx(math.exp(a - 6) - 1 + a, rel=1e-12)
    a = 10.0
    direct = [a]
    for n in range(2, 5):
        direct.append(math.exp(min(direct[-1] - 3 * n, 700.0)) - 1 + direct[-1])
    rec = recursion_iterate(a, 4)
    assert [s.saturated for s in rec] == [False, False, True, True]
    for s, d in zip(rec, direct):
        if d < SATURATION:
            assert not s.saturated and s.value == pytest.approx(d, rel=1e-12)
        else:
            assert s.saturated


def test_blowup_report_on_flagged_run(trace):
    rep = blowup_bound_report(trace)
    assert rep["flag_time"] == trace.flag_time < rep["T_bound"] == 2.0
    assert rep["flag_before_bound"]
    assert rep["min_tracked_phi_final"] < 1e-3
    assert rep["measured_a"] == []


def test_blowup_report_zero_data():
    rho0 = build_rho0()
    labels = blowup_labels(rho0, 2)
    traj = advance(discretize(InitialData.zero(), 100, extra_labels=labels), StepControl(t_end=0.1, dt_max=0.05), tracked=labels)
    rep = blowup_bound_report(track(traj, rho0, n_max=2))
    assert rep["flag_time"] is None
    assert rep["log_growth_rate"] is None


def test_certificate_document_is_strict_json(trace):
    doc = certificate_document(trace, check_inequalities(trace))
    text = render_json(doc)
    back = json.loads(text)
    assert back["schema"] == JSON_SCHEMA
    assert len(back["characteristics"]) == 8
    assert min(back["Omega_initial"]) > 20
    assert back["recursion"]["induction_holds"] is True
    assert "NaN" not in text and "Infinity" not in text
