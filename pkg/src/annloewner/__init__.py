"""Loewner evolution on annuli: Villat kernel, evolution families, conformal type.

Typical use::

    from annloewner import presets, SolverConfig, evolve_point, classify_type
    data = presets.split(0.5)
    w, traj = evolve_point(data, SolverConfig(), 0.0, 2.0, 0.1 + 0.05j)
    classify_type(data).declared_type     # 'IV'
"""

from . import presets
from .chain import (ChainApproximation, RangeReport, boundary_bound, boundary_bound_check,
                    chain_compat_defect, chain_eval, loewner_range_estimate, out_domain_check,
                    pde_residual_check)
from .classify import (IntegralVerdict, TypeReport, classify_type, decide_type, integral_I1,
                       integral_I2, integral_I_mixed, trajectory_limit_probe)
from .domain_system import (AffineToZero, CanonicalSystem, ConstantOmega, ExpApproach,
                            HarmonicDecay, IdenticallyZero, PiecewiseLinear, TimeChangedSystem,
                            log_deriv, module_of_annulus, r_of_t, radius_from_width,
                            system_from_dict)
from .errors import (AnnLoewnerError, ConfigError, DegenerateTimeError, DomainError,
                     MassConditionError, SamplingError, SolverError, TruncationError)
from .evolution import (SolverConfig, Trajectory, annulus_grid, check_index_preservation,
                        evolve_point, evolve_points, reflected_evolve, reparametrize,
                        semigroup_defect, trajectories, univalence_spot_check, winding_index)
from .kernel import (CircleMeasure, KernelTolerance, circle_nodes, free_term, herglotz_eval,
                     villat_eval, villat_reconstruct)
from .timefunctions import (ExpSaturatingTimeChange, LinearTimeChange, PiecewiseFunction,
                            PiecewiseLinearTimeChange, function_from_spec, time_change_from_dict)
from .vector_field import (DrivingData, MeasureSegment, ValidationReport, driving_from_dict,
                           eval_G, field_bound, field_free_term, validate_driving)

__version__ = "0.1.0"
