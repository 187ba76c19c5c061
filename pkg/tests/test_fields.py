import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boussinesq1d.fields import (
    InitialData,
    ParticleState,
    SmoothProfile,
    build_omega0,
    build_rho0,
    discretize,
    find_xn,
    graded_labels,
    insert_labels,
    transition,
)


@pytest.fixture(scope="module")
def rho0():
    return build_rho0()


def test_transition_is_flat_step():
    assert transition(0.0) == 0.0 and transition(1.0) == 1.0
    assert transition(0.5) == pytest.approx(0.5)
    y = np.linspace(0, 1, 1001)
    assert np.all(np.diff(transition(y)) >= 0)


def test_rho0_pinned_values(rho0):
    assert rho0(0.2) == 0.0
    assert abs(rho0(0.5) - 2.0) <= 1e-10
    assert abs(rho0(1 / 3) - 1.0) <= 1e-10
    assert rho0(0.0) == rho0(1.0) == 0.0


def test_rho0_structure(rho0):
    x = np.linspace(0, 1, 20001)
    r = rho0(x)
    assert np.all(r >= 0)
    assert r.max() == pytest.approx(2.0, abs=1e-12)
    assert np.all(r[(x < 0.25) | (x > 0.75)] == 0)
    assert rho0.check() == []


@given(st.floats(0.26, 0.49), st.floats(0.26, 0.49))
def test_rho0_increasing_on_left_branch(a, b):
    rho0 = build_rho0()
    if a == b:
        return
    lo, hi = min(a, b), max(a, b)
    assert rho0(lo) < rho0(hi)


def test_omega0_values():
    w = build_omega0(200)
    assert w(0.4) == 200.0
    assert w(0.6) == 0.0
    x = np.linspace(0.3, 0.45, 1001)
    assert np.all(w(x) == 200.0)
    assert np.all(w(np.linspace(0, 1, 10001)) >= 0)
    assert w.check() == []


def test_omega0_plateau_integral_bound():
    from scipy.integrate import quad

    w = build_omega0(200)
    val = quad(lambda y: w(y) / y, 1 / 3, 0.5, points=[0.45], limit=200)[0]
    # plateau [1/3, 0.45] alone gives 200 ln 1.35
    assert val >= 200 * np.log(0.45 * 3)
    assert val == pytest.approx(70.80, abs=0.01)


@pytest.mark.parametrize("M", [0.0, -1.0])
def test_omega0_rejects_nonpositive(M):
    with pytest.raises(ValueError):
        build_omega0(M)


def test_edge_flatness_detects_jump():
    bad = SmoothProfile(rule=lambda x: np.ones_like(np.asarray(x, dtype=float)), support=(0.25, 0.75), name="box")
    assert bad.check()


def test_find_xn(rho0):
    assert abs(find_xn(rho0, 1) - 1 / 3) <= 1e-10
    xs = [find_xn(rho0, n) for n in range(1, 41)]
    assert all(a > b for a, b in zip(xs, xs[1:]))
    for n, x in enumerate(xs, start=1):
        assert abs(rho0(x) - (0.5 + 2.0**-n)) <= 1e-12
    assert xs[-1] > 0.25


def test_find_xn_rejects_bad_n(rho0):
    with pytest.raises(ValueError):
        find_xn(rho0, 0)


def test_discretize_uniform():
    data = InitialData.blowup(7.0)
    s = discretize(data, 1000)
    assert np.array_equal(s.phi, np.arange(1001) / 1000)
    assert np.array_equal(s.rho, data.rho0(s.labels))
    plateau = (s.labels >= 0.3) & (s.labels <= 0.45)
    assert np.all(s.omega[plateau] == 7.0)
    assert s.phi[0] == 0.0 and s.phi[-1] == 1.0


def test_discretize_extra_labels_are_exact(rho0):
    x3 = find_xn(rho0, 3)
    s = discretize(InitialData.blowup(1.0), 100, extra_labels=[x3, 0.5])
    assert s.position_of(x3) == x3
    assert s.ordered()


def test_discretize_graded_clusters_near_quarter():
    s = discretize(InitialData.blowup(1.0), 400, layout="graded", refine_at=[1 / 3])
    near = np.sum((s.labels > 0.25) & (s.labels < 0.26))
    assert near > 400 * 0.01 * 3
    assert s.ordered()


def test_graded_labels_cover_unit_interval():
    x = graded_labels(200)
    assert x[0] == 0.0 and x[-1] == 1.0 and np.all(np.diff(x) > 0)


@pytest.mark.parametrize("N", [0, 15])
def test_discretize_rejects_small_N(N):
    with pytest.raises(ValueError):
        discretize(InitialData.zero(), N)


def test_particle_state_invariants():
    x = np.linspace(0, 1, 5)
    s = ParticleState(0.0, x, x, np.zeros(5), np.zeros(5))
    assert s.index_of(0.5) == 2
    with pytest.raises(KeyError):
        s.index_of(0.3)
    moved = s.evolve(t=1.0)
    assert moved.t == 1.0 and s.t == 0.0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.01, 0.99), min_size=2, max_size=20, unique=True))
def test_tabulated_profile_interpolates(points):
    x = np.sort(np.array(points))
    y = np.sin(5 * x) ** 2
    prof = SmoothProfile.tabulated(x, y)
    assert np.allclose(prof(x), y)
    assert prof(0.0) == 0.0 or x[0] == 0.0


def test_insert_labels_keeps_close_extra_labels():
    base = np.linspace(0.0, 1.0, 11)
    out = insert_labels(base, [0.301, 0.302, 0.303])
    for p in (0.301, 0.302, 0.303):
        assert p in out
    assert np.all(np.diff(out) > 0)
