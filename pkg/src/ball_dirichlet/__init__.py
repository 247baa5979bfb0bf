"""Dirichlet problems for radial Schroedinger operators on the unit ball.

The solution of ``Delta u = V(|x|) u`` is expanded in spherical harmonics;
each radial profile comes from an iterated-integral power series with a
certified truncation bound.
"""

from . import spherical
from .dirichlet import (
    AssumptionReport,
    DirichletSolution,
    certified_degree,
    check_assumption,
    eval_at_points,
    eval_solution,
    first_dirichlet_eigenvalue,
    named_boundary,
    solve_dirichlet,
    sufficient_uniqueness,
    w12_gram,
    w12_orthogonality_check,
)
from .errors import (
    AccuracyWarning,
    AssumptionError,
    BallDirichletError,
    ConvergenceError,
    DomainError,
    IntegrabilityError,
    OracleError,
    TruncationError,
)
from .poisson import (
    KernelEvaluator,
    PointMassData,
    eval_kernel,
    poisson_integral,
    solve_measure,
    trace_convergence,
)
from .potentials import Potential, evaluate, log_weighted_integral, weighted_integral
from .spherical import (
    HarmonicIndex,
    SphereQuadrature,
    build_quadrature,
    eval_harmonic,
    eval_zonal,
    fourier_coefficients,
)
from .spps import (
    ModeIndex,
    RadialGrid,
    RegularProfile,
    compute_profile,
    compute_profile_singular,
    compute_profiles,
    majorant_audit,
    profile_for,
    refine_profile,
)

__version__ = "0.1.0"
