"""Scalar functions of time used as driving coefficients, and time changes.

Rotation coefficients ``C(t)`` and post-degeneration rates ``α(t)`` are
piecewise ``exp(λt) · polynomial(t)`` functions; :class:`ReparametrizedFunction`
wraps one of them as ``t ↦ f(τ(t)) τ'(t)``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConfigError

__all__ = [
    "PiecewiseFunction",
    "ReparametrizedFunction",
    "TimeChange",
    "LinearTimeChange",
    "ExpSaturatingTimeChange",
    "PiecewiseLinearTimeChange",
    "function_from_spec",
    "time_change_from_dict",
]


@dataclass(frozen=True)
class PiecewiseFunction:
    """``f(t) = exp(rate_i t) · Σ_k c_ik t^k`` on ``[breaks_i, breaks_{i+1})``.

    ``breaks[0]`` must be 0; the last piece extends to infinity.
    """

    breaks: tuple
    pieces: tuple  # ((coeffs...), rate)

    def __post_init__(self):
        breaks = tuple(float(b) for b in self.breaks)
        pieces = tuple((tuple(float(c) for c in coeffs), float(rate)) for coeffs, rate in self.pieces)
        if not breaks or breaks[0] != 0.0:
            raise ConfigError("piecewise function breaks must start at 0")
        if any(b1 <= b0 for b0, b1 in zip(breaks, breaks[1:])):
            raise ConfigError("piecewise function breaks must increase strictly")
        if len(pieces) != len(breaks):
            raise ConfigError("need exactly one piece per break")
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def constant(cls, value: float) -> "PiecewiseFunction":
        return cls((0.0,), (((value,), 0.0),))

    @classmethod
    def exponential(cls, amplitude: float, rate: float) -> "PiecewiseFunction":
        return cls((0.0,), (((amplitude,), rate),))

    def _piece(self, t):
        return max(bisect.bisect_right(self.breaks, t) - 1, 0)

    def __call__(self, t: float) -> float:
        coeffs, rate = self.pieces[self._piece(t)]
        poly = 0.0
        for c in reversed(coeffs):
            poly = poly * t + c
        return poly * math.exp(rate * t) if rate else poly

    def breakpoints(self) -> tuple:
        return self.breaks[1:]

    @property
    def is_zero(self) -> bool:
        return all(all(c == 0.0 for c in coeffs) for coeffs, _ in self.pieces)

    @property
    def tail_diverges(self) -> bool:
        """Whether ``∫^∞ |f|`` is infinite (decided by the last piece)."""
        coeffs, rate = self.pieces[-1]
        if all(c == 0.0 for c in coeffs):
            return False
        return rate >= 0.0

    def is_constant(self) -> bool:
        return all(rate == 0.0 and all(c == 0.0 for c in coeffs[1:]) for coeffs, rate in self.pieces)

    def integral(self, a: float, b: float) -> float:
        """``∫_a^b f`` by adaptive quadrature on each piece (``b`` may be ``inf``)."""
        pts = [a] + [x for x in self.breaks if a < x < b] + [b]
        total = 0.0
        for lo, hi in zip(pts, pts[1:]):
            val, _ = integrate.quad(self, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
            total += val
        return total

    def to_dict(self) -> dict:
        return {"breaks": list(self.breaks),
                "pieces": [{"poly": list(c), "exp": r} for c, r in self.pieces]}


def function_from_spec(spec):
    """Build a time function from a number or a dict (see :meth:`PiecewiseFunction.to_dict`)."""
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return PiecewiseFunction.constant(float(spec))
    if isinstance(spec, dict):
        spec = dict(spec)
        if "reparametrized" in spec:
            base = function_from_spec(spec.pop("reparametrized"))
            tau = time_change_from_dict(spec.pop("tau"))
            if spec:
                raise ConfigError(f"unknown keys in function spec: {sorted(spec)}")
            return ReparametrizedFunction(base, tau)
        if "pieces" in spec:
            breaks = spec.pop("breaks", [0.0])
            pieces = []
            for p in spec.pop("pieces"):
                p = dict(p)
                pieces.append((p.pop("poly", [0.0]), p.pop("exp", 0.0)))
                if p:
                    raise ConfigError(f"unknown keys in piece: {sorted(p)}")
            if spec:
                raise ConfigError(f"unknown keys in function spec: {sorted(spec)}")
            return PiecewiseFunction(tuple(breaks), tuple(pieces))
        coeffs = spec.pop("poly", [0.0])
        rate = spec.pop("exp", 0.0)
        if spec:
            raise ConfigError(f"unknown keys in function spec: {sorted(spec)}")
        return PiecewiseFunction((0.0,), ((coeffs, rate),))
    raise ConfigError(f"cannot interpret {spec!r} as a time function")


class TimeChange:
    """Increasing, locally absolutely continuous ``τ`` with ``τ(0) = 0``."""

    def __call__(self, t: float) -> float:
        raise NotImplementedError

    def derivative(self, t: float) -> float:
        raise NotImplementedError

    def inverse(self, u: float) -> float:
        raise NotImplementedError

    def breakpoints(self) -> tuple:
        return ()

    @property
    def supremum(self) -> float:
        return math.inf

    @property
    def is_identity(self) -> bool:
        return False


@dataclass(frozen=True)
class LinearTimeChange(TimeChange):
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ConfigError("time change slope must be positive")

    def __call__(self, t):
        return self.rate * t

    def derivative(self, t):
        return self.rate

    def inverse(self, u):
        return u / self.rate

    @property
    def is_identity(self):
        return self.rate == 1.0

    def to_dict(self):
        return {"kind": "linear", "rate": self.rate}


@dataclass(frozen=True)
class ExpSaturatingTimeChange(TimeChange):
    """``τ(t) = horizon · (1 - e^{-t})``, mapping ``[0, ∞)`` onto ``[0, horizon)``."""

    horizon: float

    def __post_init__(self):
        if not self.horizon > 0:
            raise ConfigError("horizon must be positive")

    def __call__(self, t):
        return -self.horizon * math.expm1(-t)

    def derivative(self, t):
        return self.horizon * math.exp(-t)

    def inverse(self, u):
        if u >= self.horizon:
            return math.inf
        return -math.log1p(-u / self.horizon)

    @property
    def supremum(self):
        return self.horizon

    def to_dict(self):
        return {"kind": "exp_saturating", "horizon": self.horizon}


@dataclass(frozen=True)
class PiecewiseLinearTimeChange(TimeChange):
    """Interpolates ``(t_i, τ_i)`` from ``(0, 0)``; the last slope continues forever."""

    knots: tuple

    def __post_init__(self):
        knots = tuple((float(a), float(b)) for a, b in self.knots)
        if len(knots) < 2 or knots[0] != (0.0, 0.0):
            raise ConfigError("time change knots must start at (0, 0) and have >= 2 entries")
        for (t0, u0), (t1, u1) in zip(knots, knots[1:]):
            if not t1 > t0 or not u1 > u0:
                raise ConfigError("time change slope must be positive on every piece")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "_t", np.array([k[0] for k in knots]))
        object.__setattr__(self, "_u", np.array([k[1] for k in knots]))

    def _slope(self, i):
        (t0, u0), (t1, u1) = self.knots[i], self.knots[i + 1]
        return (u1 - u0) / (t1 - t0)

    def __call__(self, t):
        i = min(bisect.bisect_right(self._t, t) - 1, len(self.knots) - 2)
        return self.knots[i][1] + self._slope(i) * (t - self.knots[i][0])

    def derivative(self, t):
        i = min(bisect.bisect_right(self._t, t) - 1, len(self.knots) - 2)
        return self._slope(i)

    def inverse(self, u):
        i = min(bisect.bisect_right(self._u, u) - 1, len(self.knots) - 2)
        return self.knots[i][0] + (u - self.knots[i][1]) / self._slope(i)

    def breakpoints(self):
        return tuple(t for t, _ in self.knots[1:-1])

    @property
    def is_identity(self):
        return all(a == b for a, b in self.knots)

    def to_dict(self):
        return {"kind": "piecewise_linear", "knots": [list(k) for k in self.knots]}


def time_change_from_dict(d) -> TimeChange:
    d = dict(d)
    kind = d.pop("kind", None)
    try:
        if kind == "linear":
            tau = LinearTimeChange(float(d.pop("rate")))
        elif kind == "exp_saturating":
            tau = ExpSaturatingTimeChange(float(d.pop("horizon")))
        elif kind == "piecewise_linear":
            tau = PiecewiseLinearTimeChange(tuple(tuple(k) for k in d.pop("knots")))
        else:
            raise ConfigError(f"unknown time change kind {kind!r}")
    except KeyError as exc:
        raise ConfigError(f"time change '{kind}' is missing field {exc}") from None
    if d:
        raise ConfigError(f"unknown keys in time change: {sorted(d)}")
    return tau


@dataclass(frozen=True)
class ReparametrizedFunction:
    """``t ↦ f(τ(t)) τ'(t)``."""

    base: object
    tau: TimeChange

    def __call__(self, t):
        return self.base(self.tau(t)) * self.tau.derivative(t)

    def breakpoints(self):
        pts = set(self.tau.breakpoints())
        for b in self.base.breakpoints():
            if b < self.tau.supremum:
                pts.add(self.tau.inverse(b))
        return tuple(sorted(pts))

    @property
    def is_zero(self):
        return self.base.is_zero

    @property
    def tail_diverges(self):
        if math.isinf(self.tau.supremum):
            return self.base.tail_diverges
        return False

    def is_constant(self):
        return False

    def integral(self, a, b):
        # substitution u = τ(t)
        ub = self.tau.supremum if math.isinf(b) else self.tau(b)
        return self.base.integral(self.tau(a), ub)

    def to_dict(self):
        return {"reparametrized": self.base.to_dict(), "tau": self.tau.to_dict()}
