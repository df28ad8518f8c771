"""Propagators, Duhamel operators and the nonlinear Picard solver."""

from bsns.evolution.duhamel import (
    BoundaryDuhamel,
    NeumannResidual,
    TraceProfile,
    boundary_trace,
    boundary_trace_with_profile,
    neumann_residual,
    op_D,
    op_Theta,
    op_Thetastar,
    op_Tstar,
    solve_linear,
)
from bsns.evolution.nonlinear import (
    AmplitudeThreshold,
    ContinuationReport,
    MassIdentity,
    NonlinearProblem,
    SmallnessReport,
    SolveDiagnostics,
    SubcriticalWindow,
    amplitude_threshold,
    extend_in_time,
    mass_derivative_residual,
    picard_solve,
    require_unforced,
    smallness_report,
    subcritical_window,
    uniqueness_probe,
)
from bsns.evolution.propagators import (
    HalfSpacePropagator,
    adjoint_T,
    gaussian_evolution_x,
    gaussian_evolution_z,
    propagate,
    propagate_x,
    propagate_z,
    propagate_z_kernel,
)

__all__ = [
    "AmplitudeThreshold",
    "BoundaryDuhamel",
    "ContinuationReport",
    "HalfSpacePropagator",
    "MassIdentity",
    "NeumannResidual",
    "NonlinearProblem",
    "SmallnessReport",
    "SolveDiagnostics",
    "SubcriticalWindow",
    "TraceProfile",
    "adjoint_T",
    "amplitude_threshold",
    "boundary_trace",
    "boundary_trace_with_profile",
    "extend_in_time",
    "gaussian_evolution_x",
    "gaussian_evolution_z",
    "mass_derivative_residual",
    "neumann_residual",
    "op_D",
    "op_Theta",
    "op_Thetastar",
    "op_Tstar",
    "picard_solve",
    "propagate",
    "propagate_x",
    "propagate_z",
    "propagate_z_kernel",
    "require_unforced",
    "smallness_report",
    "solve_linear",
    "uniqueness_probe",
]
