"""Exact and semiclassical spectra for the damped exterior wave problem."""

from .ball import ProblemConfig, counting_function, spectrum_up_to
from .branches import monotonicity_audit, negative_count, zero_crossing
from .expr import parse_damping
from .radial import log_derivative, mode_dtn
from .report import build_report, emit
from .symbol_jets import general_symbol, pde_residual_order
from .weyl import Ellipsoid, Sphere, weyl_coefficient
from .wkb import boundary_symbol, error_scaling_test, radial_jet

__all__ = [
    "ProblemConfig",
    "counting_function",
    "spectrum_up_to",
    "monotonicity_audit",
    "negative_count",
    "zero_crossing",
    "parse_damping",
    "log_derivative",
    "mode_dtn",
    "build_report",
    "emit",
    "general_symbol",
    "pde_residual_order",
    "Ellipsoid",
    "Sphere",
    "weyl_coefficient",
    "boundary_symbol",
    "error_scaling_test",
    "radial_jet",
]
