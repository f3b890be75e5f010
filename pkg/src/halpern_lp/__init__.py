"""Restarted Halpern PDHG with reflection for linear programming."""

from .lp_model import (
    InvalidProblemError,
    Iterate,
    LpError,
    LpProblem,
    NumericalBreakdownError,
    SparseMatrix,
    p_support,
    project_box,
    project_dual_cone,
)
from .mps_io import MpsParseError, SolutionReport, parse_mps, read_mps, write_solution
from .solver import ConfigError, SolverConfig, load_config, solve
from .termination import KktResiduals, ToleranceConfig, is_optimal, kkt_residuals

__all__ = [
    "ConfigError",
    "InvalidProblemError",
    "Iterate",
    "KktResiduals",
    "LpError",
    "LpProblem",
    "MpsParseError",
    "NumericalBreakdownError",
    "SolutionReport",
    "SolverConfig",
    "SparseMatrix",
    "ToleranceConfig",
    "is_optimal",
    "kkt_residuals",
    "load_config",
    "p_support",
    "parse_mps",
    "project_box",
    "project_dual_cone",
    "read_mps",
    "solve",
    "write_solution",
]
