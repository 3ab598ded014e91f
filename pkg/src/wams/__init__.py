"""Weighted Ambrosio-Tortorelli / Mumford-Shah toolkit.

Modules: ``fields``, ``weights``, ``energy``, ``profiles``, ``solver``,
``gammalab``, ``bilevel`` and ``cli``.
"""
from .energy import EnergyReport, Normalization, at_energy, ms_energy
from .errors import SolverError, ValidationError, WamsError
from .fields import Grid, JumpSet, PiecewiseField, ScalarField, Segment, gradient, sample
from .kernels import BACKEND
from .solver import SolveResult, SolverConfig, alternate, solve_u, solve_v
from .weights import WeightField, build_partition_weight, traces

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "EnergyReport", "Grid", "JumpSet", "Normalization", "PiecewiseField",
    "ScalarField", "Segment", "SolveResult", "SolverConfig", "SolverError", "ValidationError",
    "WamsError", "WeightField", "alternate", "at_energy", "build_partition_weight", "gradient",
    "ms_energy", "sample", "solve_u", "solve_v", "traces",
]
