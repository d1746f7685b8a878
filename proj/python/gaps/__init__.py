"""Alternating relaxed projections for convex feasibility and cone programs."""

from ._core import (
    ConfigError,
    DimensionError,
    FactorizationError,
    SolveInfo,
    averagedness_constant,
    beta,
    normal_matrix,
    outer_alpha,
    parameter_regime,
    project,
    project_affine,
    solve_cone_program,
    solve_feasibility,
)

__all__ = [
    "ConfigError",
    "DimensionError",
    "FactorizationError",
    "SolveInfo",
    "averagedness_constant",
    "beta",
    "normal_matrix",
    "outer_alpha",
    "parameter_regime",
    "project",
    "project_affine",
    "solve_cone_program",
    "solve_feasibility",
]
