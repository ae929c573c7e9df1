"""Admissible weights for weighted Hardy-Sobolev inequalities: classification, norms and numerics."""

from .admit import AdmissibilityVerdict, DomainSpec, WeightSpec, classify
from .errors import (
    ConvergenceFailure,
    ExponentRangeError,
    HardyAdmitError,
    NumericFailure,
    UnsupportedCaseError,
    ValidationError,
)
from .exponents import ExponentContext
from .solve import RadialMesh, minimize_rayleigh
from .verify import TestFunction, empirical_best_constant, hardy_ratio

__all__ = [
    "AdmissibilityVerdict",
    "ConvergenceFailure",
    "DomainSpec",
    "ExponentContext",
    "ExponentRangeError",
    "HardyAdmitError",
    "NumericFailure",
    "RadialMesh",
    "TestFunction",
    "UnsupportedCaseError",
    "ValidationError",
    "WeightSpec",
    "classify",
    "empirical_best_constant",
    "hardy_ratio",
    "minimize_rayleigh",
]
