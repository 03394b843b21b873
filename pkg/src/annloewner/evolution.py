"""Evolution families generated by the Carathéodory ODE ``dw/dt = G(w, t)``.

Integration runs in the logarithmic coordinate ``ζ = log w``, where the
equation reads ``dζ/dt = G(w, t)/w``.  There the annulus ``A_r`` becomes the
strip ``log r < Re ζ < 0``, closed-form families are affine in time, and
trajectories that tend to 0 (and to the shrinking inner circle) keep full
relative accuracy.  Each smooth piece of the driving data is integrated with
an embedded Dormand–Prince 8(5,3) pair; steps never straddle a breakpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import DOP853

from .domain_system import TimeChangedSystem
from .errors import ConfigError, DegenerateTimeError, DomainError, SamplingError, SolverError
from .timefunctions import ReparametrizedFunction, TimeChange
from .vector_field import DrivingData, MeasureSegment, segment_velocity

__all__ = [
    "SolverConfig",
    "Trajectory",
    "evolve_point",
    "evolve_points",
    "reflected_evolve",
    "semigroup_defect",
    "winding_index",
    "check_index_preservation",
    "univalence_spot_check",
    "reparametrize",
]

COMPLETED = "completed"
GUARD_HIT = "guard_hit"
STEP_FAILURE = "step_failure"


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and safeguards for the ODE integration.

    ``boundary_guard`` ε halts integration once ``|w| >= 1 - ε`` or once the
    point sits in the innermost fraction ε of the annulus measured on the
    logarithmic scale, ``log(|w|/r) <= ε log(1/r)``.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    boundary_guard: float = 1e-9
    max_steps: int = 200_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.max_step > 0):
            raise ConfigError("solver tolerances and max_step must be positive")
        if not 0 < self.boundary_guard < 1:
            raise ConfigError("boundary_guard must lie in (0, 1)")

    def tightened(self, factor: float = 10.0) -> "SolverConfig":
        return replace(self, rel_tol=self.rel_tol / factor, abs_tol=self.abs_tol / factor)


@dataclass
class Trajectory:
    """Time samples of one solution; ``status_time`` is set when integration halted early."""

    times: np.ndarray
    points: np.ndarray
    status: str = COMPLETED
    status_time: float | None = None

    @property
    def rho(self) -> np.ndarray:
        return np.abs(self.points)

    @property
    def completed(self) -> bool:
        return self.status == COMPLETED

    def summary(self) -> dict:
        return {"status": self.status, "status_time": self.status_time,
                "t_start": float(self.times[0]), "t_end": float(self.times[-1]),
                "n_steps": int(self.times.size - 1),
                "w_end": [float(self.points[-1].real), float(self.points[-1].imag)]}


@dataclass
class _Flow:
    times: np.ndarray
    zeta: np.ndarray  # shape (n_times, n_points)
    status: str
    status_time: float | None
    message: str = ""

    @property
    def final(self):
        return np.exp(self.zeta[-1])


def _check_start(data: DrivingData, s: float, z: np.ndarray) -> None:
    r = data.system.r(s)
    az = np.abs(z)
    if np.any(az <= r) or np.any(az >= 1.0) or np.any(az == 0.0):
        raise DomainError(f"initial point outside D_s = A_{r} at s={s}")


def _guard(data: DrivingData, cfg: SolverConfig, t: float, zeta: np.ndarray) -> bool:
    re = zeta.real
    if np.any(re >= math.log1p(-cfg.boundary_guard)):
        return True
    r = data.system.r(t)
    if r > 0.0:
        log_r = math.log(r)
        if np.any(re - log_r <= -cfg.boundary_guard * log_r):
            return True
    return not np.all(np.isfinite(zeta))


def _pieces(data: DrivingData, s: float, t: float):
    pts = [s] + [b for b in data.breakpoints() if s < b < t] + [t]
    return list(zip(pts, pts[1:]))


def _flow(data: DrivingData, cfg: SolverConfig, s: float, t: float, z, record: bool = True) -> _Flow:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    zeta = np.log(z)
    times = [s]
    states = [zeta.copy()]
    for a, b in _pieces(data, s, t):
        velocity = segment_velocity(data, a, b)

        def rhs(tt, y, velocity=velocity):
            return velocity(tt, np.exp(y))

        try:
            solver = DOP853(rhs, a, zeta, b, rtol=cfg.rel_tol, atol=cfg.abs_tol,
                            max_step=cfg.max_step, vectorized=False)
        except SolverError as exc:
            return _Flow(np.array(times), np.array(states), STEP_FAILURE, a, str(exc))
        n = 0
        while solver.status == "running":
            try:
                msg = solver.step()
            except SolverError as exc:
                return _Flow(np.array(times), np.array(states), STEP_FAILURE, solver.t, str(exc))
            n += 1
            if solver.status == "failed" or n > cfg.max_steps:
                return _Flow(np.array(times), np.array(states), STEP_FAILURE, solver.t,
                             str(msg or "step cap reached"))
            y = solver.y
            if _guard(data, cfg, solver.t, y):
                times.append(solver.t)
                states.append(y.copy())
                return _Flow(np.array(times), np.array(states), GUARD_HIT, solver.t,
                             "trajectory reached the boundary guard")
            if record or solver.status != "running":
                times.append(solver.t)
                states.append(y.copy())
        zeta = solver.y.copy()
        # land exactly on the breakpoint
        times[-1] = b
    return _Flow(np.array(times), np.array(states), COMPLETED, None)


def _raise_if_failed(flow: _Flow, column: int = 0):
    if flow.status != COMPLETED:
        traj = Trajectory(flow.times, np.exp(flow.zeta[:, column]), flow.status, flow.status_time)
        raise SolverError(f"{flow.status} at t={flow.status_time}: {flow.message}",
                          status=flow.status, trajectory=traj)


def evolve_points(data: DrivingData, cfg: SolverConfig, s: float, t: float, z) -> np.ndarray:
    """``φ_{s,t}`` applied to an array of points, integrated together."""
    if not 0.0 <= s <= t:
        raise ConfigError(f"need 0 <= s <= t, got s={s}, t={t}")
    zz = np.asarray(z, dtype=complex)
    _check_start(data, s, zz)
    if t == s:
        return zz.copy()
    flow = _flow(data, cfg, s, t, zz.ravel(), record=False)
    _raise_if_failed(flow)
    return flow.final.reshape(zz.shape)


def evolve_point(data: DrivingData, cfg: SolverConfig, s: float, t: float, z: complex):
    """Return ``(φ_{s,t}(z), trajectory)``; ``φ_{s,s}`` is exactly the identity.

    Raises
    ------
    SolverError
        With ``status`` ``"guard_hit"`` or ``"step_failure"``; the partial
        trajectory is attached as ``exc.trajectory``.
    """
    if not 0.0 <= s <= t:
        raise ConfigError(f"need 0 <= s <= t, got s={s}, t={t}")
    z = complex(z)
    _check_start(data, s, np.array([z]))
    if t == s:
        return z, Trajectory(np.array([s]), np.array([z]))
    flow = _flow(data, cfg, s, t, np.array([z]))
    _raise_if_failed(flow)
    traj = Trajectory(flow.times, np.exp(flow.zeta[:, 0]))
    traj.points[0] = z
    return complex(traj.points[-1]), traj


def trajectories(data: DrivingData, cfg: SolverConfig, s: float, t: float, z) -> list:
    """Integrate several points together and split the result into trajectories.

    Failed integrations are returned with their status instead of raising.
    """
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_start(data, s, zz)
    if t == s:
        return [Trajectory(np.array([s]), np.array([v])) for v in zz]
    flow = _flow(data, cfg, s, t, zz)
    pts = np.exp(flow.zeta)
    return [Trajectory(flow.times, pts[:, k], flow.status, flow.status_time)
            for k in range(zz.size)]


def reflected_evolve(data: DrivingData, cfg: SolverConfig, s: float, t: float, z):
    """The reflected family ``r(t) / φ_{s,t}(r(s)/z)`` (non-degenerate systems only)."""
    rs, rt = data.system.r(s), data.system.r(t)
    if rs == 0.0 or rt == 0.0:
        raise DegenerateTimeError("reflection needs r(s) > 0 and r(t) > 0")
    zz = np.asarray(z, dtype=complex)
    _check_start(data, s, zz)
    if t == s:
        return complex(zz) if zz.ndim == 0 else zz.copy()
    out = rt / evolve_points(data, cfg, s, t, rs / zz)
    return complex(out) if zz.ndim == 0 else out


def semigroup_defect(data: DrivingData, cfg: SolverConfig, s: float, u: float, t: float, z) -> float:
    """``|φ_{s,t}(z) - φ_{u,t}(φ_{s,u}(z))|``."""
    if not 0.0 <= s <= u <= t:
        raise ConfigError("need 0 <= s <= u <= t")
    direct = evolve_points(data, cfg, s, t, z)
    mid = evolve_points(data, cfg, s, u, z)
    composed = evolve_points(data, cfg, u, t, mid)
    return float(np.max(np.abs(direct - composed)))


def winding_index(curve) -> int:
    """Index of the origin with respect to a closed sampled curve.

    The curve is closed automatically (last sample joined to the first).
    Summed principal-branch argument increments must each stay below π/2
    in magnitude, otherwise the sampling is declared too coarse.
    """
    c = np.asarray(curve, dtype=complex).ravel()
    if c.size < 3:
        raise SamplingError("need at least 3 samples")
    if np.any(c == 0):
        raise SamplingError("curve passes through the origin")
    steps = np.angle(np.roll(c, -1) / c)
    if np.max(np.abs(steps)) > 0.5 * math.pi:
        raise SamplingError(f"argument increment {np.max(np.abs(steps)):.3f} too large; refine sampling")
    value = steps.sum() / (2.0 * math.pi)
    n = round(value)
    if abs(value - n) > 0.1:
        raise SamplingError(f"winding value {value} is not close to an integer")
    return int(n)


def check_index_preservation(data: DrivingData, cfg: SolverConfig, s: float, t: float,
                             R: float, n: int = 256) -> bool:
    """True iff ``φ_{s,t}`` maps the circle ``|z| = R`` to a curve of index 1 about 0."""
    circle = R * np.exp(2j * np.pi * np.arange(n) / n)
    return winding_index(evolve_points(data, cfg, s, t, circle)) == 1


def annulus_grid(r: float, grid_size: int, inner: float = 0.15, outer: float = 0.85,
                 r_floor: float = 0.05) -> np.ndarray:
    """``grid_size²`` points in a compact sub-annulus, evenly spaced in log-modulus and angle."""
    lo = math.log(r) if r > 0 else math.log(r_floor)
    u = np.linspace(inner, outer, grid_size)
    radii = np.exp(lo * (1.0 - u))
    ang = 2.0 * np.pi * (np.arange(grid_size) + 0.5 * (np.arange(grid_size) % 2)[:, None]) / grid_size
    return (radii[:, None] * np.exp(1j * ang)).ravel()


def univalence_spot_check(data: DrivingData, cfg: SolverConfig, s: float, t: float,
                          grid_size: int = 20) -> bool:
    """Pairwise distinctness of ``φ_{s,t}`` on a grid in a compact sub-annulus of ``D_s``.

    Images must be separated by at least ``1e-3 · δ · L``, where ``δ`` is the
    smallest input separation and ``L`` the smallest difference quotient
    between neighbouring grid points.
    """
    z = annulus_grid(data.system.r(s), grid_size)
    w = evolve_points(data, cfg, s, t, z)
    dz = np.abs(z[:, None] - z[None, :])
    dw = np.abs(w[:, None] - w[None, :])
    np.fill_diagonal(dz, np.inf)
    np.fill_diagonal(dw, np.inf)
    nearest = np.argmin(dz, axis=1)
    rows = np.arange(z.size)
    lip = float(np.min(dw[rows, nearest] / dz[rows, nearest]))
    delta = dz.min()
    if not lip > 0:
        return False
    return bool(np.all(dw >= 1e-3 * delta * lip))


def reparametrize(data: DrivingData, tau: TimeChange) -> DrivingData:
    """Driving data of the field ``G(z, τ(t)) τ'(t)``, whose flow is ``φ_{τ(s), τ(t)}``."""
    if tau.is_identity:
        return data
    if abs(tau(0.0)) > 0.0:
        raise ConfigError("time change must satisfy τ(0) = 0")
    sup = tau.supremum
    segs = tuple(MeasureSegment(0.0 if seg.t == 0.0 else tau.inverse(seg.t), seg.mu1, seg.mu2)
                 for seg in data.measures if seg.t < sup)
    return DrivingData(TimeChangedSystem(data.system, tau),
                       ReparametrizedFunction(data.C, tau),
                       segs,
                       ReparametrizedFunction(data.alpha_post, tau))
