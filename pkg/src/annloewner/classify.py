"""Conformal type (I–IV) of an evolution family from its driving data.

Non-degenerate systems use

    I1 = ∫_0^∞ (-r'/r) ν(t) dt,    I2 = ∫_0^∞ (-r'/r) (1 - ν(t)) dt,

with ``ν(t) = mu1^t(T)``:  type I iff ``I1 + I2 < ∞``, II iff only ``I2``
diverges, III iff only ``I1`` diverges, IV iff both diverge.  Mixed and
degenerate systems use ``I = -∫_0^∞ Re N(G(·,t)/·) dt``: type IV iff ``I = ∞``,
else II.  Each verdict is cross-checked against the long-time behaviour of
``φ_{0,t}`` (and of the reflected family ``r(t)/φ_{0,t}(r(0)/z)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .evolution import SolverConfig, trajectories
from .errors import ConfigError, SolverError
from .vector_field import DIVERGENCE_THRESHOLD, DrivingData, _alpha_nu_integral

__all__ = [
    "IntegralVerdict",
    "TypeReport",
    "integral_I1",
    "integral_I2",
    "integral_I_mixed",
    "classify_type",
    "trajectory_limit_probe",
    "decide_type",
]

TENDS_TO_ZERO = "tends_to_zero"
BOUNDED_AWAY = "bounded_away"

LOEWNER_RANGE = {"I": "annulus A_rho", "II": "punctured disk D*",
                 "III": "exterior C minus closed disk", "IV": "punctured plane C*"}

# probe outcome (phi, reflected phi) required by each type
EXPECTED_PROBES = {
    "I": (BOUNDED_AWAY, BOUNDED_AWAY),
    "II": (BOUNDED_AWAY, TENDS_TO_ZERO),
    "III": (TENDS_TO_ZERO, BOUNDED_AWAY),
    "IV": (TENDS_TO_ZERO, TENDS_TO_ZERO),
}


@dataclass(frozen=True)
class IntegralVerdict:
    """A classification integral: finite value, or divergent with the partial value reached."""

    value: float
    divergent: bool
    analytic_tail: bool = False

    @property
    def finite(self) -> bool:
        return not self.divergent

    def to_dict(self) -> dict:
        return {"value": self.value, "divergent": self.divergent,
                "analytic_tail": self.analytic_tail}


def _quad_pieces(f, pts):
    total = 0.0
    for lo, hi in zip(pts, pts[1:]):
        total += integrate.quad(f, lo, hi, epsabs=1e-12, epsrel=1e-10, limit=200)[0]
    return total


def _weighted_log_r(data: DrivingData, weight, T_max: float, threshold: float) -> IntegralVerdict:
    """``∫_0^∞ (-r'/r) weight(ν(t)) dt``: quadrature on [0, T_max] plus closed-form tail."""
    sys = data.system
    if sys.kind != "nondegenerate":
        raise ConfigError("I1/I2 are defined for non-degenerate systems; use integral_I_mixed")
    pts = [0.0] + [b for b in data.breakpoints() if b < T_max] + [T_max]
    partial = _quad_pieces(lambda t: -sys.log_deriv(t) * weight(data.nu(t)), pts)
    w_inf = sys.omega_limit
    if w_inf is None:
        return IntegralVerdict(partial, partial > threshold)
    # -∫ r'/r over [a, b] = π (1/ω(b) - 1/ω(a)); measures are constant between breakpoints
    starts = [T_max] + [s.t for s in data.measures if s.t > T_max]
    tail = 0.0
    for a, b in zip(starts, starts[1:] + [math.inf]):
        wgt = weight(data.nu(a))
        if wgt == 0.0:
            continue
        wb = w_inf if math.isinf(b) else sys.omega(b)
        if wb <= 0.0:
            tail = math.inf
            break
        tail += wgt * math.pi * (1.0 / wb - 1.0 / sys.omega(a))
    if math.isinf(tail):
        return IntegralVerdict(partial, True, analytic_tail=True)
    if partial > threshold:
        return IntegralVerdict(partial, True)
    return IntegralVerdict(partial + tail, False, analytic_tail=True)


def integral_I1(data: DrivingData, T_max: float = 40.0,
                threshold: float = DIVERGENCE_THRESHOLD) -> IntegralVerdict:
    """``-∫ r'(t) mu1^t(T) / r(t) dt``."""
    return _weighted_log_r(data, lambda nu: nu, T_max, threshold)


def integral_I2(data: DrivingData, T_max: float = 40.0,
                threshold: float = DIVERGENCE_THRESHOLD) -> IntegralVerdict:
    """``-∫ r'(t) mu2^t(T) / r(t) dt``."""
    return _weighted_log_r(data, lambda nu: 1.0 - nu, T_max, threshold)


def integral_I_mixed(data: DrivingData, T_max: float = 40.0,
                     threshold: float = DIVERGENCE_THRESHOLD) -> IntegralVerdict:
    """``I = -∫_0^∞ Re N(G(·,t)/·) dt`` for mixed or degenerate systems."""
    T = data.system.degeneration_time
    if T is None:
        raise ConfigError("integral_I_mixed needs a mixed or degenerate system")
    partial = 0.0
    if T > 0.0:
        value, divergent = _alpha_nu_integral(data, min(T, T_max), threshold)
        if divergent or (T <= T_max and data.nu(T * (1 - 1e-12)) > 0.0):
            return IntegralVerdict(value, True)
        partial = value
    if T_max > T:
        alpha = data.alpha_post
        pts = [T] + [b for b in alpha.breakpoints() if T < b < T_max] + [T_max]
        partial += sum(alpha.integral(lo, hi) for lo, hi in zip(pts, pts[1:]))
    if partial > threshold:
        return IntegralVerdict(partial, True)
    alpha = data.alpha_post
    if alpha.tail_diverges:
        return IntegralVerdict(partial, True, analytic_tail=True)
    tail = alpha.integral(max(T, T_max), math.inf)
    return IntegralVerdict(partial + tail, False, analytic_tail=True)


def decide_type(I1_divergent: bool, I2_divergent: bool) -> str:
    """Decision table for non-degenerate systems."""
    return {(False, False): "I", (False, True): "II",
            (True, False): "III", (True, True): "IV"}[(I1_divergent, I2_divergent)]


def default_probe_points(data: DrivingData, n: int = 4) -> np.ndarray:
    r0 = data.system.r(0.0)
    rho = math.sqrt(r0) if r0 > 0 else 0.5
    angles = np.array([0.0, 0.5 * math.pi + 0.3, math.pi, 1.5 * math.pi + 0.1])[:n]
    return rho * np.exp(1j * angles)


def _probe_moduli(data, cfg, z_set, T_big, reflected):
    sys = data.system
    start = sys.r(0.0) / np.asarray(z_set) if reflected else np.asarray(z_set)
    trajs = trajectories(data, cfg, 0.0, T_big, start)
    for tr in trajs:
        if not tr.completed:
            raise SolverError(f"probe integration stopped: {tr.status} at t={tr.status_time}",
                              status=tr.status, trajectory=tr)
    times = trajs[0].times
    rho = np.array([tr.rho for tr in trajs])  # (n_points, n_times)
    if reflected:
        r_t = np.array([sys.r(t) for t in times])
        rho = r_t[None, :] / rho
    return times, rho


def trajectory_limit_probe(data: DrivingData, cfg: SolverConfig | None = None, z_set=None,
                           T_big: float = 40.0, theta_zero: float = 0.02,
                           reflected: bool = False) -> str:
    """``"tends_to_zero"`` iff every ``|φ_{0,T_big}(z)| < theta_zero`` with a decreasing last quarter.

    With ``reflected=True`` the same test is applied to ``r(t)/φ_{0,t}(r(0)/z)``.
    """
    cfg = cfg or SolverConfig()
    z_set = default_probe_points(data) if z_set is None else np.atleast_1d(z_set)
    if reflected and data.system.kind != "nondegenerate":
        raise ConfigError("the reflected probe needs a non-degenerate system")
    times, rho = _probe_moduli(data, cfg, z_set, T_big, reflected)
    if np.max(rho[:, -1]) >= theta_zero:
        return BOUNDED_AWAY
    tail = rho[:, times >= 0.75 * T_big]
    if tail.shape[1] >= 2 and np.any(tail[:, 1:] > tail[:, :-1] * (1.0 + 1e-9)):
        return BOUNDED_AWAY
    return TENDS_TO_ZERO


@dataclass
class TypeReport:
    """Classification integrals, declared type and trajectory cross-check."""

    declared_type: str
    I1: IntegralVerdict | None
    I2: IntegralVerdict | None
    I: IntegralVerdict | None
    probe_phi: str
    probe_reflected: str | None
    consistent: bool
    r_infinity: float | None
    system_kind: str

    @property
    def loewner_range(self) -> str:
        return LOEWNER_RANGE[self.declared_type]

    def to_dict(self) -> dict:
        def v(x):
            return None if x is None else x.to_dict()
        return {
            "declared_type": self.declared_type,
            "loewner_range": self.loewner_range,
            "system_kind": self.system_kind,
            "I1": v(self.I1), "I2": v(self.I2), "I": v(self.I),
            "trajectory_probe": {"phi": self.probe_phi, "reflected": self.probe_reflected},
            "consistent": self.consistent,
            "r_infinity": self.r_infinity,
        }

    def verdict_line(self) -> str:
        flag = "consistent" if self.consistent else "INCONSISTENT"
        return f"type {self.declared_type} ({self.loewner_range}); probes {self.probe_phi}" \
               f"/{self.probe_reflected}; {flag}"


def classify_type(data: DrivingData, cfg: SolverConfig | None = None, T_max: float = 40.0,
                  threshold: float = DIVERGENCE_THRESHOLD, T_big: float = 40.0,
                  theta_zero: float = 0.02, z_set=None) -> TypeReport:
    """Declare the conformal type from the integrals and cross-check with trajectory probes."""
    cfg = cfg or SolverConfig()
    kind = data.system.kind
    if kind == "nondegenerate":
        I1 = integral_I1(data, T_max, threshold)
        I2 = integral_I2(data, T_max, threshold)
        declared = decide_type(I1.divergent, I2.divergent)
        phi = trajectory_limit_probe(data, cfg, z_set, T_big, theta_zero)
        refl = trajectory_limit_probe(data, cfg, z_set, T_big, theta_zero, reflected=True)
        consistent = (phi, refl) == EXPECTED_PROBES[declared]
        return TypeReport(declared, I1, I2, None, phi, refl, consistent,
                          data.system.r_infinity, kind)
    I = integral_I_mixed(data, T_max, threshold)
    declared = "IV" if I.divergent else "II"
    phi = trajectory_limit_probe(data, cfg, z_set, T_big, theta_zero)
    consistent = phi == EXPECTED_PROBES[declared][0]
    return TypeReport(declared, None, None, I, phi, None, consistent, 0.0, kind)
