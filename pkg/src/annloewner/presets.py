"""Named driving data used by the tests, the demos and the CLI.

Uniform-measure presets have closed-form flows:

* ``scaling``   μ1 uniform, C = 0:       φ_{s,t}(z) = z r(t)/r(s)
* ``rotation``  μ2 uniform, C = c:       φ_{s,t}(z) = e^{ic(t-s)} z
* ``split``     μ1, μ2 uniform (ν, 1-ν): φ_{s,t}(z) = e^{ic(t-s)} z (r(t)/r(s))^ν
* ``degenerate_radial``  r ≡ 0, α = 1:   φ_{s,t}(z) = e^{-(t-s)} z
"""

from __future__ import annotations

import math

import numpy as np

from .domain_system import (AffineToZero, ConstantOmega, ExpApproach, HarmonicDecay,
                            IdenticallyZero)
from .errors import ConfigError
from .kernel import CircleMeasure
from .timefunctions import PiecewiseFunction
from .vector_field import DrivingData, MeasureSegment

__all__ = ["PRESETS", "get_preset", "random_atomic_family"]


def _uniform_pair(nu: float):
    return CircleMeasure.uniform(nu), CircleMeasure.uniform(1.0 - nu)


def split(nu: float = 0.5, c: float = 0.0, system=None) -> DrivingData:
    system = system or HarmonicDecay(1.0, 1.0)
    mu1, mu2 = _uniform_pair(nu)
    return DrivingData(system, PiecewiseFunction.constant(c), (MeasureSegment(0.0, mu1, mu2),))


def scaling(system=None) -> DrivingData:
    return split(1.0, 0.0, system)


def rotation(c: float = 0.7, system=None) -> DrivingData:
    return split(0.0, c, system)


def constant_system(c: float = 0.0) -> DrivingData:
    return split(1.0, c, ConstantOmega(1.0))


def exp_approach(nu: float = 0.5, c: float = 0.3) -> DrivingData:
    return split(nu, c, ExpApproach(2.0, 1.0, 0.5))


def degenerate(alpha=1.0, c: float = 0.0, mu1=None) -> DrivingData:
    alpha = alpha if isinstance(alpha, PiecewiseFunction) else PiecewiseFunction.constant(alpha)
    mu1 = mu1 or CircleMeasure.uniform(1.0)
    return DrivingData(IdenticallyZero(), PiecewiseFunction.constant(c),
                       (MeasureSegment(0.0, mu1, CircleMeasure.zero()),), alpha)


def degenerate_radial() -> DrivingData:
    return degenerate(1.0)


def degenerate_decay() -> DrivingData:
    return degenerate(PiecewiseFunction.exponential(1.0, -1.0))


def mixed(nu: float = 0.0, alpha=0.0, c: float = 0.5, T: float = 1.0, omega0: float = 1.0,
          before=None, after=None) -> DrivingData:
    """AffineToZero(omega0, T): measures ``before`` on [0, T), Carathéodory ``after`` from T."""
    alpha = alpha if isinstance(alpha, PiecewiseFunction) else PiecewiseFunction.constant(alpha)
    mu1, mu2 = before or _uniform_pair(nu)
    after = after or CircleMeasure.uniform(1.0)
    return DrivingData(AffineToZero(omega0, T), PiecewiseFunction.constant(c),
                       (MeasureSegment(0.0, mu1, mu2), MeasureSegment(T, after, CircleMeasure.zero())),
                       alpha)


def mixed_atomic() -> DrivingData:
    """Valid mixed-type data with atoms: μ2 has a point mass before T, μ1 after."""
    before = (CircleMeasure.zero(), CircleMeasure(((1.0, 0.3),), 0.7))
    after = CircleMeasure(((2.5, 0.4),), 0.6)
    return mixed(before=before, after=after, alpha=PiecewiseFunction.exponential(1.0, -1.0), c=0.4)


def random_atomic_family(seed: int, nu: float | None = None, system=None,
                         switch_time: float = 0.9) -> DrivingData:
    """Seeded two-atom plus uniform driving on a non-degenerate system.

    Two measure segments (switching at ``switch_time``) each carry two atoms
    and a uniform remainder.  With ``0 < nu < 1`` one atom sits in each
    measure; ``nu = 0`` (``1``) puts both atoms in μ2 (μ1).
    """
    rng = np.random.default_rng(seed)
    system = system or HarmonicDecay(1.0, 1.0)
    if nu is None:
        nu = float(rng.uniform(0.2, 0.8))
    segs = []
    for t0 in (0.0, switch_time):
        th = rng.uniform(0.0, 2.0 * math.pi, size=2)
        frac = rng.uniform(0.2, 0.6, size=2)
        if nu == 0.0:
            w = frac * 0.5
            mu1 = CircleMeasure.zero()
            mu2 = CircleMeasure(((th[0], w[0]), (th[1], w[1])), 1.0 - w.sum())
        elif nu == 1.0:
            w = frac * 0.5
            mu1 = CircleMeasure(((th[0], w[0]), (th[1], w[1])), 1.0 - w.sum())
            mu2 = CircleMeasure.zero()
        else:
            a, b = frac[0] * nu, frac[1] * (1.0 - nu)
            mu1 = CircleMeasure(((th[0], a),), nu - a)
            mu2 = CircleMeasure(((th[1], b),), 1.0 - nu - b)
        segs.append(MeasureSegment(t0, mu1, mu2))
    c = float(rng.uniform(-1.0, 1.0))
    return DrivingData(system, PiecewiseFunction.constant(c), tuple(segs))


PRESETS = {
    "constant": constant_system,
    "scaling": scaling,
    "rotation": rotation,
    "split": split,
    "exp_approach": exp_approach,
    "degenerate_radial": degenerate_radial,
    "degenerate_decay": degenerate_decay,
    "mixed_rotation": lambda: mixed(0.0, alpha=1.0),
    "mixed_rotation_frozen": lambda: mixed(0.0, alpha=0.0),
    "mixed_split": lambda: mixed(0.5, alpha=1.0),
    "mixed_atomic": mixed_atomic,
}


def get_preset(name: str, **kwargs) -> DrivingData:
    if name.startswith("random_atomic:"):
        return random_atomic_family(int(name.split(":", 1)[1]), **kwargs)
    try:
        return PRESETS[name](**kwargs)
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; known: {sorted(PRESETS)}") from None
