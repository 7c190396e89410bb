"""Stationary radial-basis-function interpolation on regular grids.

The package builds lattice cardinal functions on the Fourier side, uses
them for a semi-discrete method-of-lines treatment of constant-coefficient
pseudo-differential evolution equations, and evaluates the closed-form
constants that govern convergence orders, lower bounds and the saturation
plateaus of nearly-flat basis functions.
"""

from .bases import BasisFunction, CutoffSpec, make_basis, modified_bessel_k, verify_membership
from .cardinal import (
    CardinalFunction,
    cardinal_samples,
    fix_strang_fit,
    lagrange_coefficients,
    lagrange_defect,
    lagrange_symbol,
    periodized_transform,
)
from .constants import constants_report, heat_constants, interp_constants, shape_sweep
from .harness import ExperimentConfig, StudyResult, estimate_rate, run_study
from .multiplier import heat_multiplier, scheme_defect, scheme_multiplier, wiener_error_scheme
from .spectral import (
    SpectralDensity,
    alias_apply,
    interp_error_density,
    interp_error_norm,
    interpolate_spatial,
    make_density,
    weighted_l1_norm,
    weighted_sup_norm,
)
from .symbols import LevySpec, Symbol, asymptotic_limit, levy_symbol, make_symbol

__version__ = "0.1.0"

__all__ = [
    "BasisFunction",
    "CardinalFunction",
    "CutoffSpec",
    "ExperimentConfig",
    "LevySpec",
    "SpectralDensity",
    "StudyResult",
    "Symbol",
    "alias_apply",
    "asymptotic_limit",
    "cardinal_samples",
    "constants_report",
    "estimate_rate",
    "fix_strang_fit",
    "heat_constants",
    "heat_multiplier",
    "interp_constants",
    "interp_error_density",
    "interp_error_norm",
    "interpolate_spatial",
    "lagrange_coefficients",
    "lagrange_defect",
    "lagrange_symbol",
    "levy_symbol",
    "make_basis",
    "make_density",
    "make_symbol",
    "modified_bessel_k",
    "periodized_transform",
    "run_study",
    "scheme_defect",
    "scheme_multiplier",
    "shape_sweep",
    "verify_membership",
    "weighted_l1_norm",
    "weighted_sup_norm",
    "wiener_error_scheme",
]
