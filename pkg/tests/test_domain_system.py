import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from annloewner import (AffineToZero, ConstantOmega, DegenerateTimeError, ExpApproach,
                        HarmonicDecay, IdenticallyZero, LinearTimeChange, PiecewiseLinear,
                        TimeChangedSystem, log_deriv, module_of_annulus, r_of_t, system_from_dict)
from annloewner.errors import ConfigError

SYSTEMS = [
    ConstantOmega(1.0),
    AffineToZero(1.0, 2.0),
    HarmonicDecay(1.0, 1.0),
    ExpApproach(2.0, 1.0, 0.5),
    IdenticallyZero(),
    PiecewiseLinear(((0.0, 2.0), (1.0, 1.0), (3.0, 0.5))),
    PiecewiseLinear(((0.0, 1.0), (2.0, 0.0))),
    TimeChangedSystem(AffineToZero(1.0, 1.0), LinearTimeChange(2.0)),
]


def test_r_of_t_examples():
    assert r_of_t(ConstantOmega(1.0), 5.0) == pytest.approx(math.exp(-math.pi), rel=1e-15)
    assert r_of_t(AffineToZero(1.0, 2.0), 2.0) == 0.0
    h = HarmonicDecay(1.0, 1.0)
    vals = [r_of_t(h, t) for t in np.linspace(0, 50, 200)]
    assert all(v > 0 for v in vals) and all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-60


def test_log_deriv_examples():
    assert log_deriv(ConstantOmega(3.0), 7.0) == 0.0
    h = HarmonicDecay(1.0, 1.0)
    assert log_deriv(h, 0.0) == pytest.approx(-math.pi, rel=1e-15)
    eps = 1e-6
    fd = (math.log(h.r(eps)) - math.log(h.r(0.0))) / eps  # one-sided at t=0
    assert fd == pytest.approx(-math.pi, rel=1e-6)


def test_log_deriv_blows_up_near_threshold():
    a = AffineToZero(1.0, 2.0)
    t = 2.0 - 1e-4
    expected = -math.pi / (1.0 * (1 - t / 2.0)) ** 2 * 0.5
    assert log_deriv(a, t) == pytest.approx(expected, rel=1e-9)
    # r itself underflows here; difference log r = -π/ω instead
    fd = (-math.pi / a.omega(t + 1e-9) + math.pi / a.omega(t - 1e-9)) / 2e-9
    assert fd == pytest.approx(expected, rel=1e-4)
    with pytest.raises(DegenerateTimeError):
        log_deriv(a, 2.0)
    with pytest.raises(DegenerateTimeError):
        log_deriv(IdenticallyZero(), 0.0)


def test_module_examples():
    assert module_of_annulus(0.25, 0.5) == pytest.approx(0.11031780007632579, rel=1e-15)
    assert module_of_annulus(0.01, 0.01 * math.exp(2 * math.pi)) == pytest.approx(1.0, rel=1e-14)
    assert module_of_annulus(0.3, 0.6) == pytest.approx(module_of_annulus(0.03, 0.06), rel=1e-14)
    for bad in [(0.5, 0.25), (0.0, 0.5), (-0.1, 0.5), (0.5, 0.5)]:
        with pytest.raises(ConfigError):
            module_of_annulus(*bad)


@given(st.floats(0.01, 0.5), st.floats(0.51, 0.99), st.floats(0.0, 0.009), st.floats(0.0, 0.4))
def test_module_monotone_under_enlargement(r1, r2, d1, d2):
    assert module_of_annulus(r1 - d1, min(r2 + d2, 1.0)) >= module_of_annulus(r1, r2) - 1e-15


@pytest.mark.parametrize("sys", SYSTEMS, ids=lambda s: type(s).__name__)
def test_radius_monotone_and_in_range(sys):
    ts = np.linspace(0, 10, 1001)
    rs = np.array([sys.r(t) for t in ts])
    assert np.all((rs >= 0) & (rs < 1))
    assert np.all(np.diff(rs) <= 1e-15)
    ws = np.array([sys.omega(t) for t in ts])
    assert np.all(ws >= 0) and np.all(np.diff(ws) <= 1e-15)


@pytest.mark.parametrize("sys", SYSTEMS, ids=lambda s: type(s).__name__)
def test_kind_tag_matches_radius(sys):
    T = sys.degeneration_time
    ts = np.linspace(0, 10, 301)
    pos = [sys.r(t) > 0 for t in ts]
    if sys.kind == "nondegenerate":
        assert all(pos)
    elif sys.kind == "degenerate":
        assert not any(pos)
    else:
        assert all(p == (t < T) for p, t in zip(pos, ts))


def test_affine_threshold_exact():
    a = AffineToZero(1.5, 1.0)
    assert a.r(1.0) == 0.0 and a.r(7.0) == 0.0
    assert a.r(1.0 - 1e-2) > 0.0  # r underflows double precision once ω < π/745
    assert a.kind == "mixed"


@pytest.mark.parametrize("sys", [s for s in SYSTEMS if s.kind == "nondegenerate"],
                         ids=lambda s: type(s).__name__)
@pytest.mark.parametrize("a,b", [(0.0, 1.0), (0.5, 4.0), (2.0, 2.5)])
def test_log_deriv_integrates_to_log_ratio(sys, a, b):
    pts = [a] + [p for p in sys.breakpoints() if a < p < b] + [b]
    total = sum(integrate.quad(sys.log_deriv, lo, hi, epsabs=1e-13, epsrel=1e-12)[0]
                for lo, hi in zip(pts, pts[1:]))
    assert math.exp(total) == pytest.approx(sys.r(b) / sys.r(a), rel=1e-8)
    assert total == pytest.approx(sys.log_r_increment(a, b), abs=1e-9)


def test_piecewise_right_derivative_at_knot():
    p = PiecewiseLinear(((0.0, 2.0), (1.0, 1.0), (3.0, 0.5)))
    assert p.domega(1.0) == pytest.approx(-0.25)
    assert p.domega(0.999) == pytest.approx(-1.0)
    assert p.domega(5.0) == 0.0


@pytest.mark.parametrize("knots", [((1.0, 1.0),), ((0.0, 1.0), (0.0, 0.5)), ((0.0, 1.0), (1.0, 2.0)),
                                   ((0.0, 1.0), (1.0, -0.5))])
def test_piecewise_validation(knots):
    with pytest.raises(ConfigError):
        PiecewiseLinear(knots)


@pytest.mark.parametrize("cls,args", [(ConstantOmega, (0.0,)), (AffineToZero, (1.0, 0.0)),
                                      (HarmonicDecay, (1.0, -1.0)), (ExpApproach, (1.0, 2.0, 1.0))])
def test_constructor_validation(cls, args):
    with pytest.raises(ConfigError):
        cls(*args)


def test_limits():
    assert ExpApproach(2.0, 1.0, 0.5).r_infinity == pytest.approx(math.exp(-math.pi))
    assert HarmonicDecay(1.0, 1.0).r_infinity == 0.0
    assert ConstantOmega(2.0).r_infinity == pytest.approx(math.exp(-math.pi / 2))


def test_time_changed_system():
    base = AffineToZero(1.0, 1.0)
    sys = TimeChangedSystem(base, LinearTimeChange(2.0))
    assert sys.degeneration_time == pytest.approx(0.5)
    assert sys.r(0.3) == base.r(0.6)
    assert sys.log_deriv(0.2) == pytest.approx(2.0 * base.log_deriv(0.4))


@pytest.mark.parametrize("sys", SYSTEMS, ids=lambda s: type(s).__name__)
def test_dict_roundtrip(sys):
    again = system_from_dict(sys.to_dict())
    for t in (0.0, 0.3, 1.7, 9.0):
        assert again.r(t) == sys.r(t)


@pytest.mark.parametrize("d", [{"kind": "nope"}, {"kind": "constant"},
                               {"kind": "constant", "omega0": 1.0, "extra": 2}])
def test_dict_rejects(d):
    with pytest.raises(ConfigError):
        system_from_dict(d)
