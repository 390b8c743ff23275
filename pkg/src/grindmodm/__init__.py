"""Grinding process parameter optimization with MODM scalarizations and TOPSIS."""

from grindmodm.errors import (
    ConfigError,
    DegenerateMatrixError,
    DomainError,
    GrindError,
    InfeasibleError,
    MatrixParseError,
    NormalizationError,
    UsageError,
)
from grindmodm.process_model import (
    DecisionVector,
    ObjectiveTriple,
    ProcessConstants,
    evaluate,
    grinding_time,
    production_cost,
    surface_roughness,
    wear_constraint_residual,
)
from grindmodm.scalarization import IdealPoint, MethodKind, MethodSpec, scalarize
from grindmodm.solver import SolveOptions, SolveResult, ideal_point, solve
from grindmodm.topsis import DecisionMatrix, TopsisResult, topsis

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DecisionMatrix",
    "DecisionVector",
    "DegenerateMatrixError",
    "DomainError",
    "GrindError",
    "IdealPoint",
    "InfeasibleError",
    "MatrixParseError",
    "MethodKind",
    "MethodSpec",
    "NormalizationError",
    "ObjectiveTriple",
    "ProcessConstants",
    "SolveOptions",
    "SolveResult",
    "TopsisResult",
    "UsageError",
    "evaluate",
    "grinding_time",
    "ideal_point",
    "production_cost",
    "scalarize",
    "solve",
    "surface_roughness",
    "topsis",
    "wear_constraint_residual",
]
