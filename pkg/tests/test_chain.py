import math

import numpy as np
import pytest

from annloewner import (ChainApproximation, ConfigError, DomainError, SolverConfig, boundary_bound,
                        boundary_bound_check, chain_compat_defect, chain_eval, check_index_preservation,
                        evolve_points, loewner_range_estimate, out_domain_check, pde_residual_check,
                        presets, semigroup_defect, univalence_spot_check, winding_index)
from annloewner.chain import horizon_stability, sample_chain_configs


def test_chain_eval_examples():
    sc = ChainApproximation(presets.scaling(), 2.0)
    sys = sc.data.system
    z = 0.02 + 0.01j
    assert abs(chain_eval(sc, 0.5, z) - z * sys.r(2.0) / sys.r(0.5)) < 1e-10
    assert chain_eval(sc, 2.0, z) == z
    ro = ChainApproximation(presets.rotation(0.7), 2.0)
    assert abs(chain_eval(ro, 0.5, 0.4) - np.exp(0.7j * 1.5) * 0.4) < 1e-10
    with pytest.raises(ConfigError):
        chain_eval(ro, 2.5, 0.4)


def test_compat_defect_mirrors_semigroup():
    d = presets.random_atomic_family(7)
    ch = ChainApproximation(d, 1.3)
    z = 0.5 + 0.2j
    assert chain_compat_defect(ch, 0.0, 0.7, z) == pytest.approx(
        semigroup_defect(d, ch.cfg, 0.0, 0.7, 1.3, z), abs=1e-15)
    assert chain_compat_defect(ch, 0.0, 0.7, z) < 1e-6
    assert chain_compat_defect(ChainApproximation(presets.scaling(), 1.3), 0.0, 0.7, 0.1) < 1e-8


def test_boundary_bound_examples():
    T = math.log(10) / math.pi  # r(T)/r(0) = 0.1 on HarmonicDecay(1, 1)
    ch = ChainApproximation(presets.scaling(), T)
    assert abs(chain_eval(ch, 0.0, 0.5)) == pytest.approx(0.05, rel=1e-9)
    assert boundary_bound(0.5) == pytest.approx(2.6682, abs=1e-4)
    assert boundary_bound_check(ch, [(0.0, 0.5)])
    assert boundary_bound(0.999) > 1
    rng = np.random.default_rng(0)
    rnd = ChainApproximation(presets.random_atomic_family(9), 2.0)
    assert boundary_bound_check(rnd, [(t, z) for t, _, z in sample_chain_configs(rnd, 100, rng)])


def test_out_domain_examples():
    for d in (presets.scaling(), presets.rotation()):
        assert out_domain_check(ChainApproximation(d, 2.0), 0.5, 0.1, 0.3j)
    rnd = ChainApproximation(presets.random_atomic_family(10), 2.0)
    assert out_domain_check(rnd, 0.0, 0.4, 0.7 * np.exp(1.0j))
    with pytest.raises(DomainError):
        out_domain_check(rnd, 0.0, 0.5, 0.4)


def test_pde_residual_second_order():
    for d in (presets.scaling(), presets.rotation(), presets.random_atomic_family(11)):
        ch = ChainApproximation(d, 2.0)
        res = [pde_residual_check(ch, 0.5, 0.1 + 0.05j, h) for h in (1e-2, 1e-3)]
        assert math.log10(res[0] / res[1]) > 1.8


def test_pde_residual_trivial_chain():
    ch = ChainApproximation(presets.split(0.5, 0.0, presets.ConstantOmega(1.0)), 2.0)
    assert pde_residual_check(ch, 1.0, 0.3, 1e-3) < 1e-12


def test_pde_stencil_checks():
    ch = ChainApproximation(presets.scaling(), 2.0)
    with pytest.raises(ConfigError):
        pde_residual_check(ch, 0.001, 0.3, 0.01)
    with pytest.raises(DomainError):
        pde_residual_check(ch, 0.5, 0.9999, 1e-3)


def test_range_estimates():
    d = presets.split(1.0, 0.0, presets.ExpApproach(2.0, 1.0, 0.5))
    mins = []
    for T in (2.0, 6.0, 12.0):
        ch = ChainApproximation(d, T)
        grid = [(0.0, d.system.r(0.0) * 1.01 * np.exp(1j * np.linspace(0, 6, 5)))]
        rep = loewner_range_estimate(ch, grid)
        mins.append(rep.min_abs)
        assert rep.declared_type == "I" and rep.min_abs > d.system.r_infinity
    assert mins[0] > mins[1] > mins[2]
    assert mins[2] == pytest.approx(1.01 * d.system.r(12.0), rel=1e-9)

    const = ChainApproximation(presets.split(0.5, 0.0, presets.ConstantOmega(1.0)), 2.0)
    z = np.array([0.05, 0.5j, 0.95])
    rep = loewner_range_estimate(const, [(0.0, z)])
    assert rep.min_abs == pytest.approx(0.05) and rep.max_abs == pytest.approx(0.95)
    assert rep.declared_type == "I"


def test_nesting_lc2():
    d = presets.random_atomic_family(12)
    ch = ChainApproximation(d, 2.0)
    z = 0.2 * np.exp(1j * np.linspace(0, 6, 9))
    inner = evolve_points(d, ch.cfg, 0.3, 1.1, z)
    assert np.all(np.abs(inner) > d.system.r(1.1))
    assert np.max(np.abs(chain_eval(ch, 0.3, z) - chain_eval(ch, 1.1, inner))) < 1e-9


@pytest.mark.parametrize("name", ["scaling", "random_atomic:13", "mixed_atomic"])
def test_chain_index_and_univalence(name):
    d = presets.get_preset(name)
    ch = ChainApproximation(d, 2.0)
    c = 0.6 * np.exp(2j * np.pi * np.arange(256) / 256)
    assert winding_index(chain_eval(ch, 0.0, c)) == 1
    assert check_index_preservation(d, ch.cfg, 0.5, 2.0, 0.6)
    assert univalence_spot_check(d, ch.cfg, 0.5, 2.0, 12)


def test_reflected_orientation():
    sc = ChainApproximation(presets.scaling(), 2.0, orientation=-1)
    assert abs(chain_eval(sc, 0.5, 0.3j) - 0.3j) < 1e-10
    rnd = ChainApproximation(presets.random_atomic_family(14), 2.0, orientation=-1)
    assert chain_compat_defect(rnd, 0.2, 1.0, 0.3 + 0.1j) < 1e-8
    with pytest.raises(ConfigError):
        ChainApproximation(presets.mixed_atomic(), 2.0, orientation=-1)
    with pytest.raises(ConfigError):
        ChainApproximation(presets.scaling(), 2.0, orientation=0)


def test_horizon_stability_for_rotation():
    ch = ChainApproximation(presets.rotation(), 2.0)
    assert horizon_stability(ch, 5.0, 0.5, [0.3, 0.4j, -0.2]) < 1e-12


def test_sampled_configs_are_admissible():
    ch = ChainApproximation(presets.mixed_atomic(), 2.0)
    for t, R, z in sample_chain_configs(ch, 50, np.random.default_rng(1)):
        assert ch.data.system.r(t) < R < abs(z) < 1
