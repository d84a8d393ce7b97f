"""Numerical toolkit for the fractional Laplacian (-Delta)^s.

Four independent routes to the operator — singular-integral quadrature,
a periodized Fourier multiplier, the weighted harmonic extension, and a
stable-process Monte Carlo — plus closed-form Poisson/Green solvers on
balls and an s-harmonic least-squares approximator.  The routes share no
code, so agreement between them is evidence, not tautology; the checks
in :mod:`fraclap.verify` lean on that.
"""

from .errors import (ConvergenceFailure, DomainError, FraclapError,
                     PreconditionError, UsageError)
from .constants import (ConstantSet, c_ns, constant_set, fundamental_constant,
                        green_constant, halfspace_constant, limit_ratio,
                        mean_kernel_constant, poisson_ball_constant,
                        sphere_area)
from .quadrature import (QuadratureSpec, adaptive_quad, gauss_legendre,
                         jacobi_rule_01, power_endpoint_quad, sphere_rule,
                         tail_integral)
from .fields import (Bounded, CompactSupport, PowerDecay, ScalarField,
                     audit_field, bump_field, catalog, check_L1s,
                     constant_field, dilate_arg, gaussian_field,
                     holder_seminorm, interpolated_field_1d, l1s_admissible,
                     lincomb, list_catalog, rotate, translate,
                     window_sq_field, xplus_field)
from .pointwise import OpValue, frac_lap_grid, frac_lap_point, pairing_check
from .spectral import (PeriodicGrid, SampledField, frac_lap_spectral,
                       grid_inner, sample_on_grid, semigroup_compose,
                       spectral_reference)
from .ball import (BallProblem, constant_rhs_solution, dirichlet_field,
                   fundamental_solution, green_function, mean_kernel,
                   poisson_kernel_ball, s_mean_average, solve_full,
                   solve_homogeneous, solve_nonhomogeneous)
from .extension import (ExtensionField, build_extension, conormal_trace,
                        extend, halfspace_kernel, trace_constant,
                        weighted_divergence_residual)
from .stable import isotropic_stable, one_sided_stable, sym_stable
from .mc import (BallDomain, BoxDomain, McConfig, McEstimate, UnionDomain,
                 extrapolate_generator, generator_check, mc_solve_dirichlet,
                 sample_exit)
from .density import (ApproxResult, HarmonicBasis, approximate, build_basis,
                      combination, harnack_failure_demo)
from .verify import (Report, check_harnack, check_max_principle,
                     check_regularity_estimates, run_all)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceFailure", "DomainError", "FraclapError", "PreconditionError",
    "UsageError",
    "ConstantSet", "c_ns", "constant_set", "fundamental_constant",
    "green_constant", "halfspace_constant", "limit_ratio",
    "mean_kernel_constant", "poisson_ball_constant", "sphere_area",
    "QuadratureSpec", "adaptive_quad", "gauss_legendre", "jacobi_rule_01",
    "power_endpoint_quad", "sphere_rule", "tail_integral",
    "Bounded", "CompactSupport", "PowerDecay", "ScalarField", "audit_field",
    "bump_field", "catalog", "check_L1s", "constant_field", "dilate_arg",
    "gaussian_field", "holder_seminorm", "interpolated_field_1d",
    "l1s_admissible", "lincomb", "list_catalog", "rotate", "translate",
    "window_sq_field", "xplus_field",
    "OpValue", "frac_lap_grid", "frac_lap_point", "pairing_check",
    "PeriodicGrid", "SampledField", "frac_lap_spectral", "grid_inner",
    "sample_on_grid", "semigroup_compose", "spectral_reference",
    "BallProblem", "constant_rhs_solution", "dirichlet_field",
    "fundamental_solution", "green_function", "mean_kernel",
    "poisson_kernel_ball", "s_mean_average", "solve_full",
    "solve_homogeneous", "solve_nonhomogeneous",
    "ExtensionField", "build_extension", "conormal_trace", "extend",
    "halfspace_kernel", "trace_constant", "weighted_divergence_residual",
    "isotropic_stable", "one_sided_stable", "sym_stable",
    "BallDomain", "BoxDomain", "McConfig", "McEstimate", "UnionDomain",
    "extrapolate_generator", "generator_check", "mc_solve_dirichlet",
    "sample_exit",
    "ApproxResult", "HarmonicBasis", "approximate", "build_basis",
    "combination", "harnack_failure_demo",
    "Report", "check_harnack", "check_max_principle",
    "check_regularity_estimates", "run_all",
]
