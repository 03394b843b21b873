"""Finite-horizon Loewner chains ``f_t = φ_{t,T}`` and checks of their defining properties.

For ``0 <= s <= t <= T`` the identity ``f_s = f_t ∘ φ_{s,t}`` is the flow
property of the ODE, so these maps form an (approximate) Loewner chain
associated with the evolution family.  The raw horizon map is used as is, no
rotation or scaling normalisation is applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .classify import classify_type
from .errors import ConfigError, DomainError, SamplingError
from .evolution import SolverConfig, evolve_points, reflected_evolve, winding_index
from .vector_field import DrivingData, eval_G

__all__ = [
    "ChainApproximation",
    "chain_eval",
    "chain_compat_defect",
    "boundary_bound",
    "boundary_bound_check",
    "out_domain_check",
    "sample_chain_configs",
    "pde_residual_check",
    "loewner_range_estimate",
    "horizon_stability",
    "RangeReport",
]


@dataclass(frozen=True)
class ChainApproximation:
    data: DrivingData
    horizon: float
    cfg: SolverConfig = field(default_factory=SolverConfig)
    orientation: int = 1

    def __post_init__(self):
        if not self.horizon > 0:
            raise ConfigError("horizon must be positive")
        if self.orientation not in (1, -1):
            raise ConfigError("orientation must be +1 or -1")
        if self.orientation == -1 and self.data.system.r(self.horizon) == 0.0:
            raise ConfigError("orientation -1 needs r > 0 up to the horizon")


def chain_eval(chain: ChainApproximation, t: float, z):
    """``f_t(z) = φ_{t,T}(z)``, or the reflected ``r(T)/φ_{t,T}(r(t)/z)`` when orientation is -1."""
    if not 0.0 <= t <= chain.horizon:
        raise ConfigError(f"t={t} outside [0, {chain.horizon}]")
    if chain.orientation == -1:
        out = reflected_evolve(chain.data, chain.cfg, t, chain.horizon, z)
    else:
        out = evolve_points(chain.data, chain.cfg, t, chain.horizon, z)
    return complex(out) if np.ndim(z) == 0 else out


def chain_compat_defect(chain: ChainApproximation, s: float, t: float, z) -> float:
    """``|f_s(z) - f_t(φ_{s,t}(z))|``."""
    if not 0.0 <= s <= t <= chain.horizon:
        raise ConfigError("need 0 <= s <= t <= horizon")
    left = chain_eval(chain, s, z)
    step = reflected_evolve if chain.orientation == -1 else evolve_points
    right = chain_eval(chain, t, step(chain.data, chain.cfg, s, t, z))
    return float(np.max(np.abs(left - right)))


def boundary_bound(z) -> np.ndarray:
    """``π / sqrt(2 log(1/|z|))``, the growth bound for index-preserving maps into D*."""
    return math.pi / np.sqrt(2.0 * np.log(1.0 / np.abs(z)))


def boundary_bound_check(chain: ChainApproximation, samples) -> bool:
    """``|f_t(z)| <= π/sqrt(2 log(1/|z|)) + 1e-9`` on every ``(t, z)`` sample.

    ``samples`` is an iterable of ``(t, z)`` pairs or of ``(t, array_of_z)`` pairs.
    """
    for t, z in samples:
        f = chain_eval(chain, t, z)
        if np.any(np.abs(f) > boundary_bound(z) + 1e-9):
            return False
    return True


def out_domain_check(chain: ChainApproximation, t: float, R: float, z, n: int = 512,
                     max_n: int = 8192) -> bool:
    """``f_t(z)`` lies outside the curve ``f_t(C(0, R))`` whenever ``R < |z|``.

    The circle sampling is doubled (up to ``max_n``) while the image curve is
    too coarse for a reliable winding count around ``f_t(z)``.
    """
    r = chain.data.system.r(t)
    if not r < R < abs(z) < 1.0:
        raise DomainError(f"need r(t)={r} < R={R} < |z|={abs(z)} < 1")
    while True:
        circle = R * np.exp(2j * np.pi * np.arange(n) / n)
        pts = chain_eval(chain, t, np.append(circle, z))
        try:
            return winding_index(pts[:-1] - pts[-1]) == 0
        except SamplingError:
            if 2 * n > max_n:
                raise
            n *= 2


def sample_chain_configs(chain: ChainApproximation, n: int, rng) -> list:
    """``n`` random ``(t, R, z)`` with ``r(t) < R < |z| < 1`` for the geometric checks.

    ``R`` and ``|z|`` are drawn on the logarithmic scale of the annulus ``D_t``
    (with ``r(t)`` floored at 0.01) and kept a fixed log-distance apart.
    """
    sys = chain.data.system
    out = []
    for _ in range(n):
        t = float(rng.uniform(0.0, chain.horizon))
        lo = math.log(max(sys.r(t), 0.01))
        a, b = np.sort(rng.uniform(0.05, 0.95, 2))
        if b - a < 0.1:
            b = min(a + 0.1, 0.99)
        R, az = math.exp(lo * (1.0 - a)), math.exp(lo * (1.0 - b))
        out.append((t, R, complex(az * np.exp(2j * math.pi * rng.uniform()))))
    return out


def _dz_derivative(chain, s, z, h):
    """Fourth-order central difference of ``f_s`` along the real direction."""
    offsets = np.array([-2.0, -1.0, 1.0, 2.0]) * h
    vals = chain_eval(chain, s, z + offsets)
    return (vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12.0 * h)


def pde_residual_check(chain: ChainApproximation, s: float, z: complex, h: float,
                       hz: float | None = None) -> float:
    """``|∂_s f_s(z) + G(z, s) f_s'(z)|`` with centered differences in ``s`` and ``z``.

    The ``z``-derivative uses step ``hz`` (default ``1e-3``) and a fourth-order
    stencil, so the residual is dominated by the ``O(h²)`` time difference.
    """
    hz = 1e-3 if hz is None else hz
    if not 0.0 <= s - h and s + h <= chain.horizon:
        raise ConfigError("time stencil leaves [0, horizon]")
    lo_t = max(chain.data.system.r(s - h), chain.data.system.r(s + h))
    if not lo_t < abs(z) - 2 * hz and abs(z) + 2 * hz < 1.0:
        raise DomainError("z stencil leaves the domain")
    ds = (chain_eval(chain, s + h, z) - chain_eval(chain, s - h, z)) / (2.0 * h)
    fprime = _dz_derivative(chain, s, z, hz)
    return float(abs(ds + eval_G(chain.data, z, s) * fprime))


@dataclass
class RangeReport:
    min_abs: float
    max_abs: float
    label: str
    declared_type: str

    def to_dict(self) -> dict:
        return {"min_abs": self.min_abs, "max_abs": self.max_abs,
                "label": self.label, "declared_type": self.declared_type}


def loewner_range_estimate(chain: ChainApproximation, grid, type_report=None) -> RangeReport:
    """Moduli range of ``f_t(z)`` over a grid of ``(t, z_array)`` pairs plus the type label."""
    lo, hi = math.inf, 0.0
    for t, z in grid:
        a = np.abs(chain_eval(chain, t, np.atleast_1d(z)))
        lo, hi = min(lo, float(a.min())), max(hi, float(a.max()))
    rep = type_report or classify_type(chain.data, chain.cfg)
    return RangeReport(lo, hi, rep.loewner_range, rep.declared_type)


def horizon_stability(chain: ChainApproximation, horizon2: float, t: float, z) -> float:
    """``max |f_t^{(T2)}(z) - c f_t^{(T)}(z)|`` after a single complex renormalisation ``c``.

    ``c`` is fitted by least squares over the sample, so rotation and scaling
    differences between the two horizons are factored out.  A diagnostic only.
    """
    if not horizon2 >= chain.horizon:
        raise ConfigError("horizon2 must be >= the chain horizon")
    longer = ChainApproximation(chain.data, horizon2, chain.cfg, chain.orientation)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    f1, f2 = chain_eval(chain, t, z), chain_eval(longer, t, z)
    c = np.vdot(f1, f2) / np.vdot(f1, f1)
    return float(np.max(np.abs(f2 - c * f1)))
