"""Villat kernel of the annulus and the Herglotz-type functions built from it.

For ``0 <= r < 1`` the Villat kernel is the annulus analogue of the Schwarz
kernel ``(1 + z)/(1 - z)``.  It has the Laurent expansion

.. math:: K_r(z) = 1 + 2 \\sum_{k \\ge 1} \\frac{z^k - (r^2/z)^k}{1 - r^{2k}},

valid on ``r**2 < |z| < 1``.  Splitting ``1/(1 - r^{2k}) = 1 + r^{2k}/(1 - r^{2k})``
turns the slowly convergent ``z**k`` part into the closed form
``(1 + z)/(1 - z)``, and what remains converges like ``max(r**2 |z|, r**2/|z|)**k``.
:func:`villat_eval` sums that remainder until an explicit geometric tail
bound drops below ``KernelTolerance.abs_tol``.

Functions of the class V_r are represented by a pair of circle measures
(mu1, mu2) with total mass one::

    p(z) = ∫ K_r(z/ξ) dmu1(ξ) + ∫ [1 - K_r(r ξ / z)] dmu2(ξ)

Measures are finite sums of atoms plus a uniform part, see :class:`CircleMeasure`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError, MassConditionError, TruncationError

__all__ = [
    "KernelTolerance",
    "CircleMeasure",
    "villat_eval",
    "herglotz_eval",
    "free_term",
    "villat_reconstruct",
    "circle_nodes",
]

TWO_PI = 2.0 * math.pi
# relative distance to either boundary circle below which evaluation is refused
BOUNDARY_PROXIMITY = 1e-6
MASS_TOL = 1e-12


@dataclass(frozen=True)
class KernelTolerance:
    """Truncation control for the kernel series."""

    abs_tol: float = 1e-12
    max_terms: int = 1_000_000

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ConfigError(f"abs_tol must be positive, got {self.abs_tol}")
        if int(self.max_terms) < 1:
            raise ConfigError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_TOL = KernelTolerance()


@dataclass(frozen=True)
class CircleMeasure:
    """Positive measure on the unit circle: point masses plus a uniform component.

    Parameters
    ----------
    atoms : sequence of (angle, weight)
        Angles in radians, reduced to ``[0, 2π)``; weights must be non-negative.
        Atoms sharing an angle are merged and the list is stored sorted.
    uniform_mass : float
        Total mass of the normalised arc-length component.
    """

    atoms: tuple = ()
    uniform_mass: float = 0.0
    _angles: np.ndarray = field(init=False, repr=False, compare=False)
    _weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        merged = {}
        for angle, weight in self.atoms:
            weight = float(weight)
            if not math.isfinite(weight) or weight < 0:
                raise ConfigError(f"atom weight must be finite and >= 0, got {weight}")
            theta = math.fmod(float(angle), TWO_PI)
            if theta < 0:
                theta += TWO_PI
            if theta >= TWO_PI:
                theta = 0.0
            merged[theta] = merged.get(theta, 0.0) + weight
        canon = tuple(sorted((a, w) for a, w in merged.items() if w > 0))
        um = float(self.uniform_mass)
        if not math.isfinite(um) or um < 0:
            raise ConfigError(f"uniform_mass must be finite and >= 0, got {um}")
        object.__setattr__(self, "atoms", canon)
        object.__setattr__(self, "uniform_mass", um)
        object.__setattr__(self, "_angles", np.array([a for a, _ in canon], dtype=float))
        object.__setattr__(self, "_weights", np.array([w for _, w in canon], dtype=float))

    @classmethod
    def uniform(cls, mass: float = 1.0) -> "CircleMeasure":
        return cls((), mass)

    @classmethod
    def zero(cls) -> "CircleMeasure":
        return cls((), 0.0)

    def total_mass(self) -> float:
        return self.uniform_mass + float(self._weights.sum())

    @property
    def angles(self) -> np.ndarray:
        return self._angles

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def scaled(self, factor: float) -> "CircleMeasure":
        return CircleMeasure(tuple((a, w * factor) for a, w in self.atoms),
                             self.uniform_mass * factor)

    def to_dict(self) -> dict:
        return {"atoms": [[a, w] for a, w in self.atoms], "uniform": self.uniform_mass}

    @classmethod
    def from_dict(cls, d) -> "CircleMeasure":
        return cls(tuple((float(a), float(w)) for a, w in d.get("atoms", [])),
                   float(d.get("uniform", 0.0)))


def _terms_needed(r, q, tol: KernelTolerance) -> int:
    """Smallest K with 4 q^(K+1) / ((1 - r^2)(1 - q)) < abs_tol."""
    if q <= 0.0:
        return 0
    denom = (1.0 - r * r) * (1.0 - q)
    target = tol.abs_tol * denom / 4.0
    if target >= q:
        return 0
    k = math.ceil(math.log(target) / math.log(q)) - 1
    k = max(k, 0)
    while 4.0 * q ** (k + 1) / denom >= tol.abs_tol:
        k += 1
    return k


def _villat(r: float, z, n_terms: int):
    """Kernel sum with a fixed number of remainder terms; no domain checks."""
    z = np.asarray(z, dtype=complex)
    out = (1.0 + z) / (1.0 - z)
    if r == 0.0 or n_terms == 0:
        return out
    r2 = r * r
    a = r2 * z
    b = r2 / z
    pa = np.ones_like(z)
    pb = np.ones_like(z)
    r2k = 1.0
    acc = np.zeros_like(z)
    for _ in range(n_terms):
        pa = pa * a
        pb = pb * b
        r2k *= r2
        acc += (pa - pb) / (1.0 - r2k)
    return out + 2.0 * acc


def _villat_auto(r: float, z, tol: KernelTolerance = DEFAULT_TOL):
    """Tail-bounded kernel sum without domain checks (used inside the ODE right-hand side)."""
    z = np.asarray(z, dtype=complex)
    if r == 0.0 or z.size == 0:
        return (1.0 + z) / (1.0 - z)
    az = np.abs(z)
    r2 = r * r
    q = float(max(np.max(r2 * az), np.max(r2 / az)))
    if q >= 1.0:
        raise TruncationError(f"kernel series diverges at |z| range [{az.min()}, {az.max()}], r={r}")
    n = _terms_needed(r, q, tol)
    if n > tol.max_terms:
        raise TruncationError(f"kernel needs {n} terms > max_terms={tol.max_terms}")
    return _villat(r, z, n)


def _check_annulus(r: float, az) -> None:
    az = np.asarray(az)
    if np.any(az >= 1.0) or np.any(az <= r):
        raise DomainError(f"|z| must lie in ({r}, 1); got range [{az.min()}, {az.max()}]")
    if np.any(1.0 - az < BOUNDARY_PROXIMITY * (1.0 - r)):
        raise TruncationError("evaluation point too close to the outer circle")
    if r > 0.0 and np.any(az - r < BOUNDARY_PROXIMITY * r):
        raise TruncationError("evaluation point too close to the inner circle")


def villat_eval(r: float, z, tol: KernelTolerance = DEFAULT_TOL):
    """Evaluate the Villat kernel ``K_r`` on the annulus ``r < |z| < 1``.

    At ``r = 0`` this is exactly the Schwarz kernel ``(1 + z)/(1 - z)``.
    Accepts a scalar or an array of points and returns the same shape.

    Raises
    ------
    DomainError
        If some ``|z| <= r`` or ``|z| >= 1``.
    TruncationError
        If a point is within ``1e-6`` (relative) of a boundary circle, or the
        tail bound needs more than ``tol.max_terms`` terms.
    """
    if not 0.0 <= r < 1.0:
        raise DomainError(f"r must lie in [0, 1), got {r}")
    zz = np.asarray(z, dtype=complex)
    _check_annulus(r, np.abs(zz))
    out = _villat_auto(r, zz, tol)
    return complex(out) if np.ndim(z) == 0 else out


def _herglotz(r: float, mu1: CircleMeasure, mu2: CircleMeasure, z, tol=DEFAULT_TOL):
    """Unchecked evaluation of the V_r representation on an array of points."""
    z = np.asarray(z, dtype=complex)
    out = np.full(z.shape, mu1.uniform_mass, dtype=complex)
    if mu1.weights.size:
        xi = np.exp(1j * mu1.angles)
        out += _villat_auto(r, z[..., None] / xi, tol) @ mu1.weights
    if mu2.weights.size and r > 0.0:
        xi = np.exp(1j * mu2.angles)
        out += (1.0 - _villat_auto(r, r * xi / z[..., None], tol)) @ mu2.weights
    return out


def herglotz_eval(r: float, mu1: CircleMeasure, mu2: CircleMeasure, z,
                  tol: KernelTolerance = DEFAULT_TOL):
    """Evaluate ``p(z) = ∫K_r(z/ξ)dmu1 + ∫[1 - K_r(rξ/z)]dmu2``.

    Atoms contribute exact kernel evaluations.  The uniform component of
    ``mu1`` contributes its mass (the circle average of ``K_r`` is 1) and the
    uniform component of ``mu2`` contributes nothing.
    """
    if not 0.0 <= r < 1.0:
        raise DomainError(f"r must lie in [0, 1), got {r}")
    total = mu1.total_mass() + mu2.total_mass()
    if abs(total - 1.0) > MASS_TOL:
        raise MassConditionError(f"mu1(T) + mu2(T) must equal 1, got {total!r}")
    if r == 0.0 and mu2.total_mass() != 0.0:
        raise MassConditionError("mu2 must vanish when r = 0")
    zz = np.asarray(z, dtype=complex)
    _check_annulus(r, np.abs(zz))
    out = _herglotz(r, mu1, mu2, zz, tol)
    return complex(out) if np.ndim(z) == 0 else out


def circle_nodes(n: int, rho: float = 1.0) -> np.ndarray:
    """``n`` equispaced points on the circle of radius ``rho``, starting at angle 0."""
    return rho * np.exp(2j * np.pi * np.arange(n) / n)


def free_term(samples) -> complex:
    """Constant Laurent coefficient from equispaced samples on a circle.

    This is the trapezoid rule for the circle average, exact for Laurent
    polynomials of degree below ``len(samples)`` in both directions.
    """
    samples = np.asarray(samples, dtype=complex)
    if samples.ndim != 1 or samples.size < 4:
        raise ConfigError(f"need at least 4 samples on the circle, got {samples.size}")
    return complex(samples.mean())


def villat_reconstruct(r: float, boundary_re_outer, boundary_re_inner, im_mean: float, z,
                       tol: KernelTolerance = DEFAULT_TOL):
    """Recover ``f(z)`` from the real part of ``f`` on both boundary circles.

    Parameters
    ----------
    r : float
        Inner radius, ``0 < r < 1``.
    boundary_re_outer, boundary_re_inner : array_like
        ``Re f`` at equispaced nodes ``ξ_j = exp(2πij/n)`` on ``|ξ| = 1`` and at
        ``r ξ_j`` on ``|ξ| = r`` (node counts may differ, each at least 64).
    im_mean : float
        Circle average of ``Im f`` (the same on every concentric circle).
    z : complex or array
        Evaluation points in ``r < |z| < 1``.
    """
    if not 0.0 < r < 1.0:
        raise DomainError(f"reconstruction needs 0 < r < 1, got {r}")
    outer = np.asarray(boundary_re_outer, dtype=float)
    inner = np.asarray(boundary_re_inner, dtype=float)
    if outer.size < 64 or inner.size < 64:
        raise ConfigError("reconstruction needs at least 64 samples on each circle")
    zz = np.asarray(z, dtype=complex)
    _check_annulus(r, np.abs(zz))
    xi_o = circle_nodes(outer.size)
    xi_i = circle_nodes(inner.size)
    flat = zz.reshape(-1, 1)
    # kernel arguments |z/ξ| = |z| and |rξ/z| = r/|z| stay inside (r, 1)
    term_o = _villat_auto(r, flat / xi_o, tol) @ outer / outer.size
    term_i = (_villat_auto(r, r * xi_i / flat, tol) - 1.0) @ inner / inner.size
    out = (term_o + term_i + 1j * im_mean).reshape(zz.shape)
    return complex(out) if np.ndim(z) == 0 else out
