"""bsns - Bessel-Schrödinger evolution on the half-space with a nonlinear Neumann boundary."""

from bsns.config import RunConfig, load_config, parse_config
from bsns.evolution import (
    NonlinearProblem,
    SolveDiagnostics,
    boundary_trace,
    boundary_trace_with_profile,
    op_D,
    op_Theta,
    op_Thetastar,
    op_Tstar,
    picard_solve,
    propagate,
    propagate_x,
    propagate_z,
    solve_linear,
)
from bsns.exceptions import (
    GridMismatchError,
    InsufficientResolutionError,
    InvalidParameterError,
    NonConvergenceError,
    NumericalFailureError,
    SolverError,
)
from bsns.fields import BoundaryTrace, HalfSpaceField, SpaceTimeField
from bsns.numerics import (
    CartesianGrid,
    TimeGrid,
    WeightedRadialGrid,
    build_radial_grid,
    kernel_full,
    kernel_sa,
    self_dual_radial_grid,
)
from bsns.solver import HalfSpaceSolver, SolveResult

__version__ = "0.1.0"

__all__ = [
    "BoundaryTrace",
    "CartesianGrid",
    "GridMismatchError",
    "HalfSpaceField",
    "HalfSpaceSolver",
    "InsufficientResolutionError",
    "InvalidParameterError",
    "NonConvergenceError",
    "NonlinearProblem",
    "NumericalFailureError",
    "RunConfig",
    "SolveDiagnostics",
    "SolveResult",
    "SolverError",
    "SpaceTimeField",
    "TimeGrid",
    "WeightedRadialGrid",
    "boundary_trace",
    "boundary_trace_with_profile",
    "build_radial_grid",
    "kernel_full",
    "kernel_sa",
    "load_config",
    "op_D",
    "op_Theta",
    "op_Thetastar",
    "op_Tstar",
    "parse_config",
    "picard_solve",
    "propagate",
    "propagate_x",
    "propagate_z",
    "self_dual_radial_grid",
    "solve_linear",
]
