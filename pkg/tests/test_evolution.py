import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from annloewner import (DomainError, ExpSaturatingTimeChange, LinearTimeChange, SamplingError,
                        SolverConfig, SolverError, annulus_grid, check_index_preservation,
                        evolve_point, evolve_points, field_bound, presets, reflected_evolve,
                        reparametrize, semigroup_defect, trajectories, univalence_spot_check,
                        winding_index)
from annloewner.errors import ConfigError, DegenerateTimeError

CFG = SolverConfig()


def _points(r, n=12):
    return annulus_grid(r, int(math.sqrt(n)) + 1)[:n]


@pytest.mark.parametrize("s,t", [(0.0, 1.0), (0.5, 2.0), (1.0, 4.0)])
def test_rotation_closed_form(s, t):
    d = presets.rotation(0.7)
    z = _points(d.system.r(s))
    assert np.max(np.abs(evolve_points(d, CFG, s, t, z) - np.exp(0.7j * (t - s)) * z)) < 1e-8


@pytest.mark.parametrize("s,t", [(0.0, 1.0), (0.5, 2.0), (1.0, 4.0)])
def test_scaling_closed_form(s, t):
    d = presets.scaling()
    z = _points(d.system.r(s))
    exact = z * d.system.r(t) / d.system.r(s)
    assert np.max(np.abs(evolve_points(d, CFG, s, t, z) - exact)) < 1e-8


def test_split_closed_form_on_exp_approach():
    d = presets.exp_approach(0.5, 0.3)
    sys = d.system
    z = _points(sys.r(0.0))
    t = 3.0
    exact = np.exp(0.3j * t) * z * (sys.r(t) / sys.r(0.0)) ** 0.5
    assert np.max(np.abs(evolve_points(d, CFG, 0.0, t, z) - exact)) < 1e-9


def test_identity_at_equal_times():
    d = presets.random_atomic_family(4)
    z = 0.3 + 0.1j
    w, traj = evolve_point(d, CFG, 0.8, 0.8, z)
    assert w == z and traj.times.tolist() == [0.8]
    arr = np.array([0.2, 0.3j])
    out = evolve_points(d, CFG, 0.8, 0.8, arr)
    assert np.array_equal(out, arr) and out is not arr


def test_trajectory_invariants():
    d = presets.random_atomic_family(2)
    z = 0.25 - 0.1j
    w, traj = evolve_point(d, CFG, 0.2, 2.5, z)
    assert traj.completed and traj.times[0] == 0.2 and traj.points[0] == z
    assert traj.times[-1] == 2.5 and traj.points[-1] == w
    assert np.all(np.diff(traj.times) > 0)
    r = np.array([d.system.r(t) for t in traj.times])
    assert np.all((traj.rho > r) & (traj.rho < 1))


def test_scaling_modulus_tracks_closed_form():
    d = presets.scaling()
    _, traj = evolve_point(d, CFG, 0.0, 3.0, 0.2)
    exact = 0.2 * np.array([d.system.r(t) for t in traj.times]) / d.system.r(0.0)
    assert np.max(np.abs(traj.rho - exact) / exact) < 1e-9


def test_reflected_examples():
    sc, ro = presets.scaling(), presets.rotation(0.7)
    z = 0.2 + 0.1j
    assert abs(reflected_evolve(sc, CFG, 0.0, 2.0, z) - z) < 1e-10
    ratio = ro.system.r(1.5) / ro.system.r(0.5)
    assert abs(reflected_evolve(ro, CFG, 0.5, 1.5, z) - ratio * np.exp(-0.7j) * z) < 1e-10
    assert reflected_evolve(ro, CFG, 1.0, 1.0, z) == z
    with pytest.raises(DegenerateTimeError):
        reflected_evolve(presets.degenerate_radial(), CFG, 0.0, 1.0, 0.5)


def test_semigroup_examples():
    sc = presets.scaling()
    assert semigroup_defect(sc, CFG, 0.0, 0.7, 1.3, 0.3) < 1e-8
    rnd = presets.random_atomic_family(7)
    assert semigroup_defect(rnd, CFG, 0.0, 0.7, 1.3, 0.5 + 0.2j) < 1e-6
    assert semigroup_defect(rnd, CFG, 0.0, 0.0, 1.3, 0.5 + 0.2j) == 0.0
    assert semigroup_defect(rnd, CFG, 0.0, 1.3, 1.3, 0.5 + 0.2j) == 0.0
    with pytest.raises(ConfigError):
        semigroup_defect(rnd, CFG, 1.0, 0.5, 2.0, 0.5)


@given(st.integers(0, 10_000), st.floats(0, 2), st.floats(0, 1), st.floats(0, 1),
       st.floats(0.1, 0.9), st.floats(0, 2 * math.pi))
def test_semigroup_property_random_families(seed, s, du, dt, u_mod, theta):
    d = presets.random_atomic_family(seed)
    u, t = s + du, s + du + dt
    r = d.system.r(s)
    z = math.exp(math.log(r) * u_mod) * complex(math.cos(theta), math.sin(theta))
    assert semigroup_defect(d, CFG, s, u, t, z) < 1e-6


def test_defect_shrinks_with_tolerance():
    d = presets.random_atomic_family(3)
    loose = SolverConfig(rel_tol=1e-5, abs_tol=1e-7)
    args = [(0.0, 0.4, 2.0, 0.1 + 0.02j), (0.3, 1.2, 2.9, -0.05 + 0.1j), (0.0, 0.9, 1.8, 0.3j)]
    coarse = max(semigroup_defect(d, loose, *a) for a in args)
    fine = max(semigroup_defect(d, loose.tightened(10), *a) for a in args)
    assert coarse / fine >= 5


def test_winding_examples():
    c = 0.5 * np.exp(2j * np.pi * np.arange(256) / 256)
    assert winding_index(c) == 1
    assert winding_index(c[::-1]) == -1
    img = evolve_points(presets.scaling(), CFG, 0.0, 1.0, c)
    assert winding_index(img) == 1
    assert winding_index(c - 2.0) == 0
    assert winding_index(np.concatenate([c, c])) == 2
    with pytest.raises(SamplingError):
        winding_index(0.5 * np.exp(2j * np.pi * np.arange(3) / 3))
    with pytest.raises(SamplingError):
        winding_index([1, 0, 1j, -1])


@pytest.mark.parametrize("name", ["scaling", "rotation", "random_atomic:5", "mixed_atomic",
                                  "degenerate_decay"])
def test_index_preservation(name):
    d = presets.get_preset(name)
    r0 = d.system.r(0.0)
    for R in (math.sqrt(r0) if r0 > 0 else 0.3, 0.95):
        assert check_index_preservation(d, CFG, 0.0, 2.0, R)


@pytest.mark.parametrize("name", ["scaling", "rotation", "random_atomic:6", "exp_approach", "mixed_atomic"])
def test_univalence(name):
    assert univalence_spot_check(presets.get_preset(name), CFG, 0.0, 1.5, 20)


def test_absolute_continuity_against_majorant():
    d = presets.random_atomic_family(8)
    z = 0.2 * np.exp(1j * np.linspace(0, 6, 7))
    s, h = 0.5, 0.05
    moved = np.abs(evolve_points(d, CFG, s, s + h, z) - z)
    r = d.system.r(s + h)
    # the trajectories stay in a compact annulus over a short step
    bound = h * max(field_bound(d, t, 0.1, 0.3) for t in np.linspace(s, s + h, 11))
    assert np.all(moved <= bound) and r < 0.1


def test_reparametrize_examples():
    sc = presets.scaling()
    star = reparametrize(sc, LinearTimeChange(2.0))
    z = 0.1 + 0.05j
    assert abs(evolve_points(star, CFG, 0.0, 1.0, z) - evolve_points(sc, CFG, 0.0, 2.0, z)) < 1e-7
    assert reparametrize(sc, LinearTimeChange(1.0)) is sc
    mixed = presets.mixed_atomic()
    sat = reparametrize(mixed, ExpSaturatingTimeChange(mixed.system.degeneration_time))
    assert sat.system.kind == "nondegenerate"
    assert all(sat.system.r(t) > 0 for t in (1.0, 3.0, 5.0))


@pytest.mark.parametrize("name", ["mixed_rotation", "mixed_atomic"])
def test_time_change_equivalence(name):
    d = presets.get_preset(name)
    tau = LinearTimeChange(2.0)
    star = reparametrize(d, tau)
    z = _points(d.system.r(0.2))
    a = evolve_points(star, CFG, 0.1, 1.2, z)
    b = evolve_points(d, CFG, 0.2, 2.4, z)
    assert np.max(np.abs(a - b)) < 1e-6


def test_crossing_threshold_matches_closed_form():
    d = presets.mixed(0.0, alpha=1.0, c=0.5)
    z = 0.4 + 0.2j
    # rotation up to T = 1, then radial contraction with rotation
    exact = z * np.exp(0.5j * 2.0) * math.exp(-1.0)
    assert abs(evolve_points(d, CFG, 0.0, 2.0, z) - exact) < 1e-9


def test_invalid_data_reports_failure():
    d = presets.mixed(0.5, alpha=1.0)
    with pytest.raises(SolverError) as info:
        evolve_point(d, CFG, 0.0, 2.0, 0.5)
    assert info.value.status in ("guard_hit", "step_failure")
    assert info.value.trajectory is not None and info.value.trajectory.times[-1] < 1.0 + 1e-12
    tr = trajectories(d, CFG, 0.0, 2.0, [0.5, 0.3j])
    assert all(not t.completed for t in tr)


def test_step_cap_is_a_failure():
    d = presets.random_atomic_family(1)
    with pytest.raises(SolverError) as info:
        evolve_point(d, SolverConfig(max_steps=2, max_step=0.01), 0.0, 1.0, 0.3)
    assert info.value.status == "step_failure"


def test_start_outside_domain():
    d = presets.scaling()
    with pytest.raises(DomainError):
        evolve_points(d, CFG, 1.0, 2.0, d.system.r(1.0) / 2)
    with pytest.raises(ConfigError):
        evolve_points(d, CFG, 2.0, 1.0, 0.5)


def test_solver_config_validation():
    for kw in ({"rel_tol": 0.0}, {"abs_tol": -1.0}, {"boundary_guard": 1.0}, {"max_step": 0.0}):
        with pytest.raises(ConfigError):
            SolverConfig(**kw)
    assert SolverConfig().tightened(10).rel_tol == pytest.approx(1e-11)
