"""fsptools: pseudospectral toolkit for a fractional Schrodinger-Poisson system.

The package computes the nonlocal field phi(u) generated by u^2 through the
Riesz kernel, evaluates the reduced variational energy and its gradient,
certifies the model hypotheses numerically, verifies the subspace geometry
behind multiplicity arguments, and finds multiple distinct critical points
of the coupled system on a periodic 3-D box.
"""

from .spectral import (
    GridSpec,
    RealField,
    SpectralField,
    forward_transform,
    inverse_transform,
    frac_laplacian,
    seminorm_dalpha,
    lp_norm,
    inner_E,
    norm_E,
    random_smooth_field,
)
from .fieldio import FieldFormatError, read_field, write_field
from .riesz import (
    PoissonSolution,
    RieszConstants,
    bound_ratios,
    coupling_integral,
    k_alpha,
    phi_derivative_action,
    riesz_constants,
    riesz_potential_direct,
    sharp_sobolev_constant,
    solve_poisson,
    solve_poisson_spectral,
)
from .model import (
    Nonlinearity,
    Potential,
    SamplingPlan,
    builtin_exp_weighted_power,
    builtin_log_quartic,
    check_hypotheses,
    harmonic_potential,
    constant_potential,
    primitive_by_quadrature,
)
from .energy import (
    EnergyBreakdown,
    GradientField,
    Problem,
    cerami_identity_check,
    energy,
    energy_and_gradient,
    evenness_check,
    gradient_field,
)
from .eigen import EigenBasis, schrodinger_eigenbasis
from .geometry import beta_k_estimate, coercivity_scan, ring_check, select_m
from .solver import SolutionSet, find_solutions, verify_solution

__version__ = "0.1.0"

__all__ = [
    "GridSpec",
    "RealField",
    "SpectralField",
    "forward_transform",
    "inverse_transform",
    "frac_laplacian",
    "seminorm_dalpha",
    "lp_norm",
    "inner_E",
    "norm_E",
    "random_smooth_field",
    "FieldFormatError",
    "read_field",
    "write_field",
    "PoissonSolution",
    "RieszConstants",
    "bound_ratios",
    "coupling_integral",
    "k_alpha",
    "phi_derivative_action",
    "riesz_constants",
    "riesz_potential_direct",
    "sharp_sobolev_constant",
    "solve_poisson",
    "solve_poisson_spectral",
    "Nonlinearity",
    "Potential",
    "SamplingPlan",
    "builtin_exp_weighted_power",
    "builtin_log_quartic",
    "check_hypotheses",
    "harmonic_potential",
    "constant_potential",
    "primitive_by_quadrature",
    "EnergyBreakdown",
    "GradientField",
    "Problem",
    "cerami_identity_check",
    "energy",
    "energy_and_gradient",
    "evenness_check",
    "gradient_field",
    "EigenBasis",
    "schrodinger_eigenbasis",
    "beta_k_estimate",
    "coercivity_scan",
    "ring_check",
    "select_m",
    "SolutionSet",
    "find_solutions",
    "verify_solution",
    "__version__",
]
