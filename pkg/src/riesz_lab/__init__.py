"""Riesz means of Laplace eigenvalues on convex domains.

Exact spectra for boxes, balls, cylinders and disjoint unions; semiclassical
comparisons; grid estimates of excess factors; restricted shape optimization;
and a config-driven experiment runner.
"""

__version__ = "0.1.0"

from .errors import BudgetExceeded, InvalidArgument, NumericalFailure, PreconditionViolation, RieszLabError
from .geometry import (
    Ball,
    Box,
    DisjointUnion,
    Interval,
    Product,
    box,
    diameter,
    format_domain,
    geometry_report,
    hausdorff_distance,
    inradius,
    normalize_unit_volume,
    parse_domain,
    scale,
    surface,
    volume,
)
from .spectrum import (
    DIRICHLET,
    NEUMANN,
    BoundaryCondition,
    counting,
    eigenvalues_below,
    riesz_mean,
    riesz_mean_union,
    riesz_value,
    set_budget,
)
from .semiclassics import (
    aizenman_lieb_lift,
    lsc,
    normalized_ratio,
    remainder_profile,
    weyl_main,
    weyl_two_term,
)
from .families import FamilySpec, parse_family
from .inequalities import (
    bly_kroger_check,
    critical_exponent_scan,
    excess_factor_estimate,
    polya_check,
    two_term_margin,
)
from .optimizer import (
    build_trial_union,
    component_count_scan,
    convergence_scan,
    optimize_single,
    optimize_union,
)
