"""Finite-element solvers, norms, and best-constant estimators."""

from .assemble import BoundaryPart, P1Space
from .constants import estimate_best_constant
from .fields import CoefficientField, FeField, ScatterConfig, SobolevExponents, SourceData
from .neumann import energy, solve_neumann, weak_residual
from .norms import grad_norm, norm, trace_plus
from .scattering import solve_scattering

__all__ = [
    "BoundaryPart",
    "CoefficientField",
    "FeField",
    "P1Space",
    "ScatterConfig",
    "SobolevExponents",
    "SourceData",
    "energy",
    "estimate_best_constant",
    "grad_norm",
    "norm",
    "solve_neumann",
    "solve_scattering",
    "trace_plus",
    "weak_residual",
]
