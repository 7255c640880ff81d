"""Variational Klein-Gordon toolkit: discrete geometry of position fields,
curvature-augmented action functionals, the stationary Klein-Gordon problem,
Lorentz boosts with the orbital/spin split, and sublevel entropy."""

__version__ = "0.1.0"

from .constants import PhysicalConstants
from .errors import (
    ArgumentError,
    ChainRuleError,
    ConvergenceError,
    DegenerateMetricError,
    KGVarError,
    SuperluminalError,
)
from .grid import Grid, ScalarField, VectorField

__all__ = [
    "PhysicalConstants",
    "Grid",
    "ScalarField",
    "VectorField",
    "KGVarError",
    "ArgumentError",
    "ChainRuleError",
    "ConvergenceError",
    "DegenerateMetricError",
    "SuperluminalError",
]
