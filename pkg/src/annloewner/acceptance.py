"""End-to-end acceptance checks shared by ``annloewner selftest`` and the test suite.

Each check returns a :class:`CriterionResult`; none of them raise.  The
oracles used here (symmetric partial sums of the kernel, closed-form flows)
are computed independently of the code under test.
"""

from __future__ import annotations

import math
import time
import traceback
from dataclasses import dataclass

import numpy as np

from . import presets as P
from .chain import (ChainApproximation, boundary_bound_check, out_domain_check,
                    pde_residual_check, sample_chain_configs)
from .classify import TENDS_TO_ZERO, classify_type
from .domain_system import HarmonicDecay
from .evolution import (SolverConfig, check_index_preservation, evolve_points, reparametrize,
                        semigroup_defect)
from .kernel import circle_nodes, free_term, villat_eval, villat_reconstruct
from .timefunctions import ExpSaturatingTimeChange, LinearTimeChange
from .vector_field import validate_driving

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_all", "symmetric_kernel"]


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "detail": self.detail, "seconds": self.seconds}


def symmetric_kernel(r: float, z, n_pairs: int = 80):
    """Symmetric partial sums ``Σ_{|ν|<=n} (1 + r^{2ν} z)/(1 - r^{2ν} z)``.

    The ``±ν`` terms are paired, which keeps every summand bounded; at
    ``r = 0`` each pair vanishes and the Schwarz kernel remains.
    """
    z = np.asarray(z, dtype=complex)
    total = (1.0 + z) / (1.0 - z)
    if r == 0.0:
        return total
    for nu in range(n_pairs, 0, -1):
        q = r ** (2 * nu)
        total = total + (1.0 + q * z) / (1.0 - q * z) - (z + q) / (z - q)
    return total


def _spread(r: float, n: int, lo: float = 0.05, hi: float = 0.95) -> np.ndarray:
    """``n`` points in ``A_r`` spread in log-modulus, golden-angle in argument."""
    u = np.linspace(lo, hi, n)
    log_in = math.log(r) if r > 0 else math.log(0.02)
    radii = np.exp(log_in * (1.0 - u))
    ang = 2.399963229728653 * np.arange(n) + 0.1
    return radii * np.exp(1j * ang)


def _kernel() -> tuple:
    worst, worst_free = 0.0, 0.0
    for r in (0.0, 0.1, 0.2, 0.3, 0.5):
        z = _spread(r, 20)
        worst = max(worst, float(np.max(np.abs(villat_eval(r, z) - symmetric_kernel(r, z)))))
        rho = math.sqrt(r) if r > 0 else 0.5
        worst_free = max(worst_free, abs(free_term(villat_eval(r, circle_nodes(512, rho))) - 1.0))
    ok = worst <= 1e-10 and worst_free <= 1e-9
    return ok, f"max |K - oracle| = {worst:.2e}, max |N(K_r) - 1| = {worst_free:.2e}"


def _reconstruction() -> tuple:
    r = 0.2

    def f(z):
        return 2.0 * z + 3.0 + 0.04 / z

    outer, inner = circle_nodes(1024), circle_nodes(1024, r)
    z = _spread(r, 50, 0.1, 0.9)
    got = villat_reconstruct(r, f(outer).real, f(inner).real, 0.0, z)
    err = float(np.max(np.abs(got - f(z))))
    return err <= 1e-8, f"max error {err:.2e} at 50 points"


def _closed_form() -> tuple:
    cfg = SolverConfig()
    sc, ro = P.scaling(), P.rotation(0.7)
    sys = sc.system
    errs = {"scaling": 0.0, "rotation": 0.0, "degenerate": 0.0}
    for s, t in ((0.0, 1.0), (0.5, 2.0), (1.0, 4.0)):
        z = _spread(sys.r(s), 20, 0.1, 0.9)
        exact = z * (sys.r(t) / sys.r(s))
        errs["scaling"] = max(errs["scaling"], float(np.max(np.abs(evolve_points(sc, cfg, s, t, z) - exact))))
        exact = np.exp(0.7j * (t - s)) * z
        errs["rotation"] = max(errs["rotation"], float(np.max(np.abs(evolve_points(ro, cfg, s, t, z) - exact))))
    deg = P.degenerate_radial()
    z = _spread(0.0, 20, 0.1, 0.9)
    for t in (0.5, 1.0, 3.0):
        errs["degenerate"] = max(errs["degenerate"],
                                 float(np.max(np.abs(evolve_points(deg, cfg, 0.0, t, z) - math.exp(-t) * z))))
    ok = max(errs.values()) <= 1e-8
    return ok, ", ".join(f"{k} {v:.1e}" for k, v in errs.items())


def _semigroup_tuples(data, n=100, seed=5, t_max=3.0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        s, u, t = np.sort(rng.uniform(0.0, t_max, 3))
        r = data.system.r(s)
        z = math.exp(math.log(r) * rng.uniform(0.1, 0.9)) * np.exp(2j * math.pi * rng.uniform())
        out.append((float(s), float(u), float(t), complex(z)))
    return out


def _semigroup() -> tuple:
    data = P.random_atomic_family(0, system=HarmonicDecay(1.0, 1.0))
    tuples = _semigroup_tuples(data)
    worst = max(semigroup_defect(data, SolverConfig(), *tp) for tp in tuples)
    # the shrink is measured where truncation error, not roundoff, dominates
    loose = SolverConfig(rel_tol=1e-5, abs_tol=1e-7)
    d_loose = max(semigroup_defect(data, loose, *tp) for tp in tuples)
    d_tight = max(semigroup_defect(data, loose.tightened(10.0), *tp) for tp in tuples)
    ratio = d_loose / d_tight if d_tight > 0 else math.inf
    ok = worst <= 1e-6 and ratio >= 5.0
    return ok, f"max defect {worst:.1e}; loose {d_loose:.1e} -> tight {d_tight:.1e} (x{ratio:.1f})"


def _type_matrix() -> tuple:
    cases = {"I": P.exp_approach(), "II": P.rotation(), "III": P.scaling(), "IV": P.split(0.5)}
    ok, parts = True, []
    for expected, data in cases.items():
        rep = classify_type(data, SolverConfig(), T_big=40.0, theta_zero=0.02)
        good = rep.declared_type == expected and rep.consistent
        if expected == "IV":
            good = good and rep.probe_phi == TENDS_TO_ZERO and rep.probe_reflected == TENDS_TO_ZERO
        ok = ok and good
        parts.append(f"{expected}->{rep.declared_type}{'' if rep.consistent else '!'}")
    return ok, " ".join(parts)


def _degenerate_types() -> tuple:
    ok, parts = True, []
    for expected, data in (("IV", P.degenerate_radial()), ("II", P.degenerate_decay())):
        rep = classify_type(data, SolverConfig())
        ok = ok and rep.declared_type == expected and rep.consistent
        parts.append(f"{expected}->{rep.declared_type} (I={rep.I.value:.3g}, probe {rep.probe_phi})")
    return ok, "; ".join(parts)


def _divergence_cases():
    cases = [(name, P.get_preset(name)) for name in sorted(P.PRESETS)]
    for seed, nu in zip(range(5), (0.0, None, 1.0, 0.0, None)):
        cases.append((f"random_atomic:{seed}/nu={nu}", P.random_atomic_family(seed, nu=nu)))
    return cases


def _divergence_equivalence() -> tuple:
    bad, skipped = [], []
    cases = []
    for name, data in _divergence_cases():
        # inadmissible data generate no evolution family; the validator must flag them
        (cases if validate_driving(data).passed else skipped).append((name, data))
    for name, data in cases:
        rep = classify_type(data, SolverConfig())
        integral = rep.I1 if rep.I1 is not None else rep.I
        if integral.divergent != (rep.probe_phi == TENDS_TO_ZERO):
            bad.append(name)
    detail = f"{len(cases) - len(bad)}/{len(cases)} agree"
    if skipped:
        detail += f"; rejected by validator: {[n for n, _ in skipped]}"
    if bad:
        detail += f"; mismatches {bad}"
    return not bad, detail


GEOMETRY_PRESETS = ("scaling", "rotation", "split", "exp_approach", "constant", "degenerate_radial",
                    "degenerate_decay", "mixed_rotation", "mixed_atomic", "random_atomic:0")


def _geometry() -> tuple:
    rng = np.random.default_rng(11)
    failures, n_checks = [], 0
    for name in GEOMETRY_PRESETS:
        chain = ChainApproximation(P.get_preset(name), 2.0)
        configs = sample_chain_configs(chain, 100, rng)
        if not boundary_bound_check(chain, [(t, z) for t, _, z in configs]):
            failures.append(f"{name}: boundary bound")
        if not all(out_domain_check(chain, t, R, z) for t, R, z in configs):
            failures.append(f"{name}: out-domain")
        r0 = chain.data.system.r(0.0)
        for R in (math.sqrt(r0) if r0 > 0 else 0.5, 0.9):
            n_checks += 1
            if not check_index_preservation(chain.data, chain.cfg, 0.0, chain.horizon, R):
                failures.append(f"{name}: winding at R={R:.3g}")
    ok = not failures
    detail = (f"{len(GEOMETRY_PRESETS)} presets x 100 configs, {n_checks} winding checks = 1"
              if ok else "; ".join(failures))
    return ok, detail


def _pde() -> tuple:
    ok, parts = True, []
    for name, data in (("scaling", P.scaling()), ("rotation", P.rotation())):
        chain = ChainApproximation(data, 2.0)
        res = [pde_residual_check(chain, 0.5, 0.3 + 0.1j, h) for h in (1e-2, 1e-3, 1e-4)]
        orders = [math.log10(res[i] / res[i + 1]) for i in range(2)]
        ok = ok and min(orders) >= 1.8
        parts.append(f"{name} orders {orders[0]:.2f}, {orders[1]:.2f}")
    return ok, "; ".join(parts)


def _time_change() -> tuple:
    cfg = SolverConfig()
    worst = 0.0
    for name in ("mixed_rotation", "mixed_atomic", "mixed_rotation_frozen"):
        data = P.get_preset(name)
        T = data.system.degeneration_time
        for tau, pairs in ((LinearTimeChange(2.0), ((0.0, 0.3), (0.1, 0.8), (0.2, 1.5))),
                           (ExpSaturatingTimeChange(T), ((0.0, 1.0), (0.5, 2.0), (1.0, 4.0)))):
            star = reparametrize(data, tau)
            for s, t in pairs:
                z = _spread(data.system.r(tau(s)), 16, 0.1, 0.9)
                a = evolve_points(star, cfg, s, t, z)
                b = evolve_points(data, cfg, tau(s), tau(t), z)
                worst = max(worst, float(np.max(np.abs(a - b))))
    return worst <= 1e-6, f"max |φ* - φ∘τ| = {worst:.1e} on 3 mixed presets, 2 time changes"


def _validator() -> tuple:
    bad = validate_driving(P.get_preset("mixed_split"))
    good = validate_driving(P.get_preset("mixed_rotation"))
    ok = (not bad.passed) and (not bad.conditions["vi_integrable"]) and good.passed
    return ok, f"nu=0.5 passed={bad.passed}, nu=0 passed={good.passed}"


CRITERIA = (
    (1, "kernel vs symmetric oracle", _kernel),
    (2, "boundary-value reconstruction", _reconstruction),
    (3, "closed-form flows", _closed_form),
    (4, "semigroup property", _semigroup),
    (5, "type matrix", _type_matrix),
    (6, "degenerate classification", _degenerate_types),
    (7, "divergence vs probe", _divergence_equivalence),
    (8, "geometric lemmas", _geometry),
    (9, "PDE residual order", _pde),
    (10, "time-change invariance", _time_change),
    (11, "validator integrability", _validator),
)


def run_criterion(number: int) -> CriterionResult:
    for num, name, fn in CRITERIA:
        if num == number:
            t0 = time.perf_counter()
            try:
                ok, detail = fn()
            except Exception as exc:  # a crash is a failed criterion, reported not raised
                ok, detail = False, f"{type(exc).__name__}: {exc}"
                detail += " | " + traceback.format_exc(limit=3).replace("\n", " ")
            return CriterionResult(num, name, bool(ok), detail, time.perf_counter() - t0)
    raise KeyError(number)


def run_all(numbers=None) -> list:
    numbers = numbers or [n for n, _, _ in CRITERIA]
    return [run_criterion(n) for n in numbers]
