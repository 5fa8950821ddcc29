"""Desk-scale toolkit for the nonlocal p-eigenvalue problem with exterior
Dirichlet condition: discrete energies, first eigenpairs for general p, the
full p=2 spectrum with its counting function, and explicit two-sided
counting-function bounds."""

from .domain_mesh import (
    Ball,
    Box,
    ComplementPotential,
    CubeUnion,
    DomainSpec,
    FracParams,
    Grid,
    Interval,
    build_grid,
    complement_potential,
    dilate,
    domain_from_dict,
)
from .energy import (
    DiscreteFunction,
    NonlocalEnergy,
    assemble,
    energy_report,
    gradient,
    lp_norm_p,
    rayleigh,
    seminorm_p,
)
from .eigensolver import (
    EigenResult,
    SolverConfig,
    Spectrum,
    SlopeFit,
    counting_function,
    first_eigenpair,
    linear_spectrum,
    percentile_window,
    stiffness_matrix,
    weyl_slope,
)
from .weyl_bounds import (
    BoundReport,
    CubeCalibration,
    bound_report,
    circumscribed_covering,
    constant_c1,
    constant_c2,
    covering_count,
    eigenvalue_growth_brackets,
    homothety_factor,
    inscribed_packing,
    lower_bound,
    lower_exponent,
    packing_count,
    upper_bound,
    upper_exponent,
)
from .properties import (
    PropertyReport,
    check_domain_monotonicity,
    check_poincare,
    check_scaling,
    check_sign_change,
    check_simplicity_gap,
    check_symmetry,
)
from . import errors

__version__ = "0.1.0"
