"""Semicomplete weak holomorphic vector fields over canonical annulus systems.

Where the annulus is non-degenerate (``r(t) > 0``) the field is

    G(w, t) = w [i C(t) + (r'(t)/r(t)) p(w, t)],    p(·, t) in V_{r(t)},

and where it has degenerated (``r(t) = 0``)

    G(w, t) = w [i C(t) - α(t) p(w, t)],            p(·, t) Carathéodory, p(0) = 1.

``p`` is given by circle measures that are piecewise constant in time.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import kernel
from .domain_system import CanonicalSystem, system_from_dict
from .errors import ConfigError, DegenerateTimeError, DomainError, MassConditionError, SolverError
from .kernel import CircleMeasure
from .timefunctions import PiecewiseFunction, function_from_spec

__all__ = [
    "MeasureSegment",
    "DrivingData",
    "ValidationReport",
    "eval_G",
    "field_free_term",
    "field_bound",
    "validate_driving",
    "driving_from_dict",
]

CONSTRUCTION_MASS_TOL = 1e-9
DIVERGENCE_THRESHOLD = 30.0
RHS_KERNEL_TOL = kernel.KernelTolerance(abs_tol=1e-15)


@dataclass(frozen=True)
class MeasureSegment:
    """Measures ``(mu1, mu2)`` in force from time ``t`` until the next segment."""

    t: float
    mu1: CircleMeasure
    mu2: CircleMeasure

    @property
    def nu(self) -> float:
        return self.mu1.total_mass()


@dataclass(frozen=True)
class DrivingData:
    """Full description of a vector field: system, rotation, measures, post-degeneration rate."""

    system: CanonicalSystem
    C: object = field(default_factory=lambda: PiecewiseFunction.constant(0.0))
    measures: tuple = ()
    alpha_post: object = field(default_factory=lambda: PiecewiseFunction.constant(0.0))

    def __post_init__(self):
        segs = tuple(self.measures)
        if not segs:
            raise ConfigError("driving data needs at least one measure segment")
        if segs[0].t != 0.0:
            raise ConfigError("first measure segment must start at t = 0")
        if any(b.t <= a.t for a, b in zip(segs, segs[1:])):
            raise ConfigError("measure breakpoints must increase strictly")
        object.__setattr__(self, "measures", segs)
        object.__setattr__(self, "_starts", [s.t for s in segs])
        T = self.system.degeneration_time
        for i, seg in enumerate(segs):
            end = segs[i + 1].t if i + 1 < len(segs) else math.inf
            m1, m2 = seg.mu1.total_mass(), seg.mu2.total_mass()
            if T is None or seg.t < T:
                if abs(m1 + m2 - 1.0) > CONSTRUCTION_MASS_TOL:
                    raise MassConditionError(
                        f"segment at t={seg.t}: mu1(T) + mu2(T) = {m1 + m2!r}, expected 1")
            if T is not None and end > T:
                if m2 != 0.0 or abs(m1 - 1.0) > CONSTRUCTION_MASS_TOL:
                    raise MassConditionError(
                        f"segment at t={seg.t} reaches r = 0: need mu2 = 0 and mu1(T) = 1")
        if T is not None:
            for t in _sample_times(T, self.alpha_post):
                if self.alpha_post(t) < -1e-12:
                    raise ConfigError(f"alpha_post({t}) < 0")

    def segment_index(self, t: float) -> int:
        return max(bisect.bisect_right(self._starts, t) - 1, 0)

    def measures_at(self, t: float):
        seg = self.measures[self.segment_index(t)]
        return seg.mu1, seg.mu2

    def nu(self, t: float) -> float:
        """``mu1^t(T)``, the free term of ``p(·, t)``."""
        return self.measures[self.segment_index(t)].nu

    def is_degenerate_at(self, t: float) -> bool:
        T = self.system.degeneration_time
        return T is not None and t >= T

    def breakpoints(self) -> tuple:
        pts = set(self.system.breakpoints()) | set(self.C.breakpoints()) | set(self._starts[1:])
        T = self.system.degeneration_time
        if T is not None:
            pts.add(T)
            pts |= {b for b in self.alpha_post.breakpoints() if b > T}
        return tuple(sorted(p for p in pts if p > 0))

    def to_dict(self) -> dict:
        return {
            "system": self.system.to_dict(),
            "C": self.C.to_dict(),
            "measures": [{"t": s.t, "mu1": s.mu1.to_dict(), "mu2": s.mu2.to_dict()}
                         for s in self.measures],
            "alpha_post": self.alpha_post.to_dict(),
        }


def _sample_times(T, fn, n=64):
    hi = max([T + 10.0] + [b + 1.0 for b in fn.breakpoints()])
    return np.linspace(T, hi, n)


def driving_from_dict(d: dict) -> DrivingData:
    """Inverse of :meth:`DrivingData.to_dict`; unknown keys are rejected."""
    d = dict(d)
    try:
        system = system_from_dict(d.pop("system"))
        raw = d.pop("measures")
    except KeyError as exc:
        raise ConfigError(f"driving data is missing {exc}") from None
    C = function_from_spec(d.pop("C", 0.0))
    alpha = function_from_spec(d.pop("alpha_post", 0.0))
    if d:
        raise ConfigError(f"unknown keys in driving data: {sorted(d)}")
    segs = []
    for m in raw:
        m = dict(m)
        seg = MeasureSegment(float(m.pop("t")),
                             CircleMeasure.from_dict(m.pop("mu1", {})),
                             CircleMeasure.from_dict(m.pop("mu2", {})))
        if m:
            raise ConfigError(f"unknown keys in measure segment: {sorted(m)}")
        segs.append(seg)
    return DrivingData(system, C, tuple(segs), alpha)


def eval_G(data: DrivingData, w, t: float):
    """Evaluate the vector field ``G(w, t)`` for ``r(t) < |w| < 1``."""
    ww = np.asarray(w, dtype=complex)
    r = data.system.r(t)
    aw = np.abs(ww)
    if np.any(aw <= r) or np.any(aw >= 1.0) or np.any(aw == 0.0):
        raise DomainError(f"w outside D_t = A_{r} at t={t}")
    mu1, mu2 = data.measures_at(t)
    if data.is_degenerate_at(t):
        p = kernel.herglotz_eval(0.0, mu1, CircleMeasure.zero(), ww)
        out = ww * (1j * data.C(t) - data.alpha_post(t) * p)
    elif r == 0.0:
        # r underflowed just below the degeneration time; only ν = 0 has a finite limit
        if mu1.total_mass() > 0.0:
            raise DegenerateTimeError(f"r({t}) underflows and the radial part diverges")
        out = ww * (1j * data.C(t))
    else:
        p = kernel.herglotz_eval(r, mu1, mu2, ww)
        out = ww * (1j * data.C(t) + data.system.log_deriv(t) * p)
    return complex(out) if np.ndim(w) == 0 else out


def segment_velocity(data: DrivingData, a: float, b: float):
    """Right-hand side ``(t, w) ↦ G(w, t)/w`` frozen to the smooth segment ``[a, b]``.

    The branch (non-degenerate or degenerate) and the measures are taken from
    the segment interior, so evaluating at the endpoints yields one-sided limits.
    """
    mid = 0.5 * (a + b) if math.isfinite(b) else a + 1.0
    mu1, mu2 = data.measures_at(mid)
    degenerate = data.is_degenerate_at(mid)
    system = data.system
    C = data.C
    zero = CircleMeasure.zero()
    nu = mu1.total_mass()

    if degenerate:
        alpha = data.alpha_post

        def velocity(t, w):
            p = kernel._herglotz(0.0, mu1, zero, w, RHS_KERNEL_TOL)
            return 1j * C(t) - alpha(t) * p
        return velocity

    def velocity(t, w):
        r = system.r(t)
        if r == 0.0:
            # one-sided limit at the degeneration time; (r'/r)(1 - K_r(rξ/w)) -> 0
            if nu > 0.0:
                raise SolverError(f"radial part of the field is not integrable up to t={t}",
                                  status="step_failure")
            return np.full(np.shape(w), 1j * C(t))
        p = kernel._herglotz(r, mu1, mu2, w, RHS_KERNEL_TOL)
        return 1j * C(t) + system.log_deriv(t) * p
    return velocity


def field_free_term(data: DrivingData, t: float) -> float:
    """``Re N(w ↦ G(w, t)/w)``: ``(r'/r) mu1^t(T)`` if r(t) > 0, ``-α(t)`` otherwise."""
    if data.is_degenerate_at(t):
        return -float(data.alpha_post(t))
    return data.system.log_deriv(t) * data.nu(t)


def field_bound(data: DrivingData, t: float, rho_min: float, rho_max: float) -> float:
    """Majorant of ``|G(w, t)|`` over ``rho_min <= |w| <= rho_max`` from the Laurent bounds."""
    r = data.system.r(t)
    if not r < rho_min <= rho_max < 1.0:
        raise DomainError("need r(t) < rho_min <= rho_max < 1")
    mu1, mu2 = data.measures_at(t)
    r2 = r * r
    y = r2 / rho_min
    A = 1.0 + 2.0 / (1.0 - r2) * (rho_max / (1.0 - rho_max) + y / (1.0 - y))
    if data.is_degenerate_at(t):
        return rho_max * (abs(data.C(t)) + abs(data.alpha_post(t)) * mu1.total_mass() * A)
    x_hi = r / rho_min
    B = 2.0 / (1.0 - r2) * (x_hi / (1.0 - x_hi) + r * rho_max / (1.0 - r * rho_max))
    p_bound = mu1.total_mass() * A + mu2.total_mass() * B
    return rho_max * (abs(data.C(t)) + abs(data.system.log_deriv(t)) * p_bound)


@dataclass
class ValidationReport:
    """Outcome of the semicompleteness checks on driving data."""

    conditions: dict
    integral_vi: float
    vi_divergent: bool
    vi_analytic_divergent: bool
    nu_in_unit_interval: bool
    messages: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.conditions.values())

    def to_dict(self) -> dict:
        return {
            "conditions": dict(self.conditions),
            "integral_vi": self.integral_vi,
            "vi_divergent": self.vi_divergent,
            "vi_analytic_divergent": self.vi_analytic_divergent,
            "nu_in_unit_interval": self.nu_in_unit_interval,
            "passed": self.passed,
            "messages": list(self.messages),
        }


def _alpha_nu_integral(data: DrivingData, T: float, threshold: float):
    """``∫_0^T (-r'/r) ν dt`` with geometric refinement toward ``T``.

    Returns ``(partial_value, divergent)``; divergence is declared once the
    partial value exceeds ``threshold``.
    """
    sys = data.system
    pts = [0.0] + [b for b in data.breakpoints() if b < T]
    total = 0.0

    def integrand(t):
        nu = data.nu(t)
        return -sys.log_deriv(t) * nu if nu else 0.0

    for lo, hi in zip(pts, pts[1:]):
        total += integrate.quad(integrand, lo, hi, epsabs=1e-12, epsrel=1e-10, limit=200)[0]
        if total > threshold:
            return total, True
    lo = pts[-1]
    if not math.isfinite(T):
        raise ValueError("T must be finite")
    gap = T - lo
    for k in range(1, 80):
        hi = T - gap * 0.5 ** k
        if not lo < hi < T:
            break
        total += integrate.quad(integrand, lo, hi, epsabs=1e-12, epsrel=1e-10, limit=200)[0]
        if total > threshold:
            return total, True
        lo = hi
    return total, False


def validate_driving(data: DrivingData, horizon: float = 40.0,
                     threshold: float = DIVERGENCE_THRESHOLD) -> ValidationReport:
    """Check the conditions characterising semicomplete fields.

    Condition (vi) asks for ``∫ α ν dt < ∞`` up to the degeneration time, with
    ``α = -r'/r`` there.  For non-degenerate systems it is checked on
    ``[0, horizon]`` only, since local integrability is all that is required.
    """
    msgs = []
    conds = {"i_form": True, "ii_measurable": True, "iv_C_locally_integrable": True}

    membership = True
    T = data.system.degeneration_time
    for i, seg in enumerate(data.measures):
        end = data.measures[i + 1].t if i + 1 < len(data.measures) else math.inf
        m1, m2 = seg.mu1.total_mass(), seg.mu2.total_mass()
        if (T is None or seg.t < T) and abs(m1 + m2 - 1.0) > CONSTRUCTION_MASS_TOL:
            membership = False
            msgs.append(f"segment t={seg.t}: masses sum to {m1 + m2}")
        if T is not None and end > T and (m2 != 0.0 or abs(m1 - 1.0) > CONSTRUCTION_MASS_TOL):
            membership = False
            msgs.append(f"segment t={seg.t}: not a Carathéodory measure after degeneration")
    conds["iii_class_membership"] = membership

    alpha_ok = True
    if T is not None:
        alpha_ok = all(data.alpha_post(t) >= -1e-12 for t in _sample_times(T, data.alpha_post))
        if not alpha_ok:
            msgs.append("alpha_post takes negative values")
    conds["v_alpha"] = alpha_ok

    nus = [seg.nu for seg in data.measures]
    nu_ok = all(-1e-12 <= v <= 1.0 + 1e-12 for v in nus)

    if T is None:
        value, divergent = _alpha_nu_integral_plain(data, horizon)
        analytic = False
    elif T == 0.0:
        value, divergent, analytic = 0.0, False, False
    else:
        value, divergent = _alpha_nu_integral(data, T, threshold)
        # ω is continuous with ω(T) = 0, so ∫(-r'/r) diverges at T; only ν = 0 there is integrable
        analytic = data.nu(T - 1e-12 * max(T, 1.0)) > 0.0
        if divergent or analytic:
            msgs.append(f"∫ α ν dt diverges toward T={T} (partial value {value:.6g})")
    conds["vi_integrable"] = not (divergent or analytic)
    return ValidationReport(conds, value, divergent, analytic, nu_ok, msgs)


def _alpha_nu_integral_plain(data, horizon):
    sys = data.system
    pts = [0.0] + [b for b in data.breakpoints() if b < horizon] + [horizon]
    total = 0.0
    for lo, hi in zip(pts, pts[1:]):
        total += integrate.quad(lambda t: -sys.log_deriv(t) * data.nu(t), lo, hi,
                                epsabs=1e-12, epsrel=1e-10, limit=200)[0]
    return total, not math.isfinite(total)
