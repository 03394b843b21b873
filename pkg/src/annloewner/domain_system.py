"""Canonical domain systems ``D_t = A_{r(t)}`` parametrised by the conformal width.

A system is described by a non-increasing width ``ω(t) >= 0``; the inner
radius is ``r(t) = exp(-π/ω(t))`` (``r = 0`` once ``ω`` vanishes), so that
``ω = -π / log r``.  Presets:

=====================  =============================================  ============
class                  ω(t)                                           kind
=====================  =============================================  ============
``ConstantOmega``      ω0                                             nondegenerate
``AffineToZero``       ω0 · max(0, 1 - t/T)                           mixed
``HarmonicDecay``      ω0 / (1 + λt)                                  nondegenerate
``ExpApproach``        ω∞ + (ω0 - ω∞) e^{-λt}                         nondegenerate
``IdenticallyZero``    0                                              degenerate
``PiecewiseLinear``    linear interpolation of breakpoints            any
``TimeChangedSystem``  ω(τ(t)) for a time change τ                    any
=====================  =============================================  ============
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

from .errors import ConfigError, DegenerateTimeError
from .timefunctions import TimeChange, time_change_from_dict

__all__ = [
    "CanonicalSystem",
    "ConstantOmega",
    "AffineToZero",
    "HarmonicDecay",
    "ExpApproach",
    "IdenticallyZero",
    "PiecewiseLinear",
    "TimeChangedSystem",
    "r_of_t",
    "log_deriv",
    "module_of_annulus",
    "system_from_dict",
]

NONDEGENERATE = "nondegenerate"
MIXED = "mixed"
DEGENERATE = "degenerate"


def radius_from_width(omega: float) -> float:
    return math.exp(-math.pi / omega) if omega > 0 else 0.0


class CanonicalSystem:
    """Interface shared by all width specifications.

    Subclasses provide ``omega``, ``domega`` (right derivative), ``breakpoints``,
    ``degeneration_time`` (``None`` if r > 0 forever) and ``omega_limit``
    (``lim ω(t)`` as t → ∞, ``None`` when unknown).
    """

    def omega(self, t: float) -> float:
        raise NotImplementedError

    def domega(self, t: float) -> float:
        raise NotImplementedError

    def breakpoints(self) -> tuple:
        return ()

    @property
    def degeneration_time(self):
        return None

    @property
    def omega_limit(self):
        return None

    @property
    def kind(self) -> str:
        T = self.degeneration_time
        if T is None:
            return NONDEGENERATE
        return DEGENERATE if T == 0.0 else MIXED

    def r(self, t: float) -> float:
        return radius_from_width(self.omega(t))

    @property
    def r_infinity(self):
        w = self.omega_limit
        return None if w is None else radius_from_width(w)

    def log_deriv(self, t: float) -> float:
        w = self.omega(t)
        if w <= 0.0:
            raise DegenerateTimeError(f"r({t}) = 0: r'/r undefined")
        return math.pi * self.domega(t) / (w * w)

    def log_r_increment(self, a: float, b: float) -> float:
        """``log(r(b)/r(a))`` in closed form, ``-inf`` if r(b) = 0."""
        wa, wb = self.omega(a), self.omega(b)
        if wa <= 0.0:
            raise DegenerateTimeError(f"r({a}) = 0")
        if wb <= 0.0:
            return -math.inf
        return math.pi * (1.0 / wa - 1.0 / wb)

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantOmega(CanonicalSystem):
    omega0: float

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ConfigError("ConstantOmega needs omega0 > 0")

    def omega(self, t):
        return self.omega0

    def domega(self, t):
        return 0.0

    @property
    def omega_limit(self):
        return self.omega0

    def to_dict(self):
        return {"kind": "constant", "omega0": self.omega0}


@dataclass(frozen=True)
class AffineToZero(CanonicalSystem):
    omega0: float
    T: float

    def __post_init__(self):
        if not (self.omega0 > 0 and self.T > 0):
            raise ConfigError("AffineToZero needs omega0 > 0 and T > 0")

    def omega(self, t):
        return self.omega0 * max(0.0, 1.0 - t / self.T)

    def domega(self, t):
        return -self.omega0 / self.T if t < self.T else 0.0

    def breakpoints(self):
        return (self.T,)

    @property
    def degeneration_time(self):
        return self.T

    @property
    def omega_limit(self):
        return 0.0

    def to_dict(self):
        return {"kind": "affine_to_zero", "omega0": self.omega0, "T": self.T}


@dataclass(frozen=True)
class HarmonicDecay(CanonicalSystem):
    omega0: float
    lam: float

    def __post_init__(self):
        if not (self.omega0 > 0 and self.lam > 0):
            raise ConfigError("HarmonicDecay needs omega0 > 0 and lam > 0")

    def omega(self, t):
        return self.omega0 / (1.0 + self.lam * t)

    def domega(self, t):
        return -self.lam * self.omega0 / (1.0 + self.lam * t) ** 2

    def log_deriv(self, t):
        # ω'/ω² is constant here
        return -math.pi * self.lam / self.omega0

    @property
    def omega_limit(self):
        return 0.0

    def to_dict(self):
        return {"kind": "harmonic_decay", "omega0": self.omega0, "lam": self.lam}


@dataclass(frozen=True)
class ExpApproach(CanonicalSystem):
    omega0: float
    omega_inf: float
    lam: float

    def __post_init__(self):
        if not (self.omega0 > self.omega_inf > 0 and self.lam > 0):
            raise ConfigError("ExpApproach needs omega0 > omega_inf > 0 and lam > 0")

    def omega(self, t):
        return self.omega_inf + (self.omega0 - self.omega_inf) * math.exp(-self.lam * t)

    def domega(self, t):
        return -self.lam * (self.omega0 - self.omega_inf) * math.exp(-self.lam * t)

    @property
    def omega_limit(self):
        return self.omega_inf

    def to_dict(self):
        return {"kind": "exp_approach", "omega0": self.omega0,
                "omega_inf": self.omega_inf, "lam": self.lam}


@dataclass(frozen=True)
class IdenticallyZero(CanonicalSystem):

    def omega(self, t):
        return 0.0

    def domega(self, t):
        return 0.0

    @property
    def degeneration_time(self):
        return 0.0

    @property
    def omega_limit(self):
        return 0.0

    def to_dict(self):
        return {"kind": "zero"}


@dataclass(frozen=True)
class PiecewiseLinear(CanonicalSystem):
    """Linear interpolation through ``(t_i, ω_i)``, constant after the last knot.

    Knots must start at ``t = 0`` with strictly increasing times and
    non-increasing, non-negative values.
    """

    knots: tuple

    def __post_init__(self):
        knots = tuple((float(t), float(w)) for t, w in self.knots)
        if not knots or knots[0][0] != 0.0:
            raise ConfigError("PiecewiseLinear knots must start at t = 0")
        for (t0, w0), (t1, w1) in zip(knots, knots[1:]):
            if not t1 > t0:
                raise ConfigError("PiecewiseLinear knot times must increase strictly")
            if w1 > w0:
                raise ConfigError("PiecewiseLinear values must be non-increasing")
        if knots[-1][1] < 0:
            raise ConfigError("PiecewiseLinear values must be >= 0")
        object.__setattr__(self, "knots", knots)

    def _segment(self, t):
        times = [k[0] for k in self.knots]
        return bisect.bisect_right(times, t) - 1

    def omega(self, t):
        i = self._segment(t)
        if i >= len(self.knots) - 1:
            return self.knots[-1][1]
        (t0, w0), (t1, w1) = self.knots[i], self.knots[i + 1]
        return w0 + (w1 - w0) * (t - t0) / (t1 - t0)

    def domega(self, t):
        i = self._segment(t)
        if i >= len(self.knots) - 1:
            return 0.0
        (t0, w0), (t1, w1) = self.knots[i], self.knots[i + 1]
        return (w1 - w0) / (t1 - t0)

    def breakpoints(self):
        return tuple(t for t, _ in self.knots[1:])

    @property
    def degeneration_time(self):
        for i, (t, w) in enumerate(self.knots):
            if w == 0.0:
                return t
        return None

    @property
    def omega_limit(self):
        return self.knots[-1][1]

    def to_dict(self):
        return {"kind": "piecewise_linear", "knots": [list(k) for k in self.knots]}


@dataclass(frozen=True)
class TimeChangedSystem(CanonicalSystem):
    """The system ``t ↦ D_{τ(t)}``."""

    base: CanonicalSystem
    tau: TimeChange

    def omega(self, t):
        return self.base.omega(self.tau(t))

    def domega(self, t):
        return self.base.domega(self.tau(t)) * self.tau.derivative(t)

    def breakpoints(self):
        pts = set(self.tau.breakpoints())
        sup = self.tau.supremum
        for b in self.base.breakpoints():
            if b < sup:
                pts.add(self.tau.inverse(b))
        return tuple(sorted(p for p in pts if p > 0))

    @property
    def degeneration_time(self):
        T = self.base.degeneration_time
        if T is None or T >= self.tau.supremum:
            return None
        return self.tau.inverse(T)

    @property
    def omega_limit(self):
        lim = self.base.omega_limit
        sup = self.tau.supremum
        if math.isinf(sup):
            return lim
        return self.base.omega(sup)

    def to_dict(self):
        return {"kind": "time_changed", "base": self.base.to_dict(), "tau": self.tau.to_dict()}


def r_of_t(sys: CanonicalSystem, t: float) -> float:
    """Inner radius ``exp(-π/ω(t))``, or 0 where the width vanishes."""
    return sys.r(t)


def log_deriv(sys: CanonicalSystem, t: float) -> float:
    """``r'(t)/r(t) = π ω'(t)/ω(t)²`` (right derivative at breakpoints)."""
    return sys.log_deriv(t)


def module_of_annulus(r1: float, r2: float) -> float:
    """Conformal module ``log(r2/r1)/(2π)`` of ``{r1 < |z| < r2}``."""
    if not (r1 > 0 and r2 > 0):
        raise ConfigError("annulus radii must be positive")
    if not r1 < r2:
        raise ConfigError("module_of_annulus needs r1 < r2")
    return math.log(r2 / r1) / (2.0 * math.pi)


def system_from_dict(d: dict) -> CanonicalSystem:
    d = dict(d)
    kind = d.pop("kind", None)
    builders = {
        "constant": lambda: ConstantOmega(float(d.pop("omega0"))),
        "affine_to_zero": lambda: AffineToZero(float(d.pop("omega0")), float(d.pop("T"))),
        "harmonic_decay": lambda: HarmonicDecay(float(d.pop("omega0")), float(d.pop("lam"))),
        "exp_approach": lambda: ExpApproach(float(d.pop("omega0")), float(d.pop("omega_inf")),
                                            float(d.pop("lam"))),
        "zero": IdenticallyZero,
        "piecewise_linear": lambda: PiecewiseLinear(tuple(tuple(k) for k in d.pop("knots"))),
        "time_changed": lambda: TimeChangedSystem(system_from_dict(d.pop("base")),
                                                  time_change_from_dict(d.pop("tau"))),
    }
    if kind not in builders:
        raise ConfigError(f"unknown system kind {kind!r}")
    try:
        system = builders[kind]()
    except KeyError as exc:
        raise ConfigError(f"system '{kind}' is missing field {exc}") from None
    if d:
        raise ConfigError(f"unknown keys in system spec: {sorted(d)}")
    return system
