"""Contour-based nonlinear eigenvalue solvers."""

from ._nlevp import (
    Circle,
    DecayReport,
    EigenPair,
    EigenResult,
    Ellipse,
    GalleryProblem,
    Interval,
    Method,
    NlevpError,
    Problem,
    QuadratureRule,
    SolverConfig,
    chebyshev_points,
    contains,
    decay_check,
    full_pencil_arnoldi,
    make_delay,
    make_diagonal,
    make_quadratic,
    newton_trace_oracle,
    quadrature,
    reduced_subspace_iteration,
    residual,
    run_config,
    standard_delay,
    standard_quadratic,
)

__all__ = [
    "Circle",
    "DecayReport",
    "EigenPair",
    "EigenResult",
    "Ellipse",
    "GalleryProblem",
    "Interval",
    "Method",
    "NlevpError",
    "Problem",
    "QuadratureRule",
    "SolverConfig",
    "chebyshev_points",
    "contains",
    "decay_check",
    "full_pencil_arnoldi",
    "make_delay",
    "make_diagonal",
    "make_quadratic",
    "newton_trace_oracle",
    "quadrature",
    "reduced_subspace_iteration",
    "residual",
    "run_config",
    "standard_delay",
    "standard_quadratic",
]
