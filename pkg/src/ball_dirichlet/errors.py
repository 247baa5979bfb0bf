"""Exception hierarchy shared by all modules."""


class BallDirichletError(Exception):
    """Base class for library errors."""


class DomainError(BallDirichletError, ValueError):
    """An argument lies outside the domain of the operation."""


class IntegrabilityError(BallDirichletError):
    """A weighted integral of the potential diverges."""


class ConvergenceError(BallDirichletError):
    """A series or refinement loop failed to reach the requested tolerance."""


class TruncationError(ConvergenceError):
    """The kernel truncation degree needed exceeds the configured cap."""

    def __init__(self, message, needed=None, cap=None):
        super().__init__(message)
        self.needed = needed
        self.cap = cap


class AssumptionError(BallDirichletError):
    """Some alpha_m(1) vanishes numerically, so the Dirichlet problem is not solvable."""

    def __init__(self, message, offending_modes=()):
        super().__init__(message)
        self.offending_modes = list(offending_modes)


class OracleError(BallDirichletError):
    """The shooting oracle could not integrate the ODE."""


class AccuracyWarning(UserWarning):
    """A quadrature looks too coarse for the requested coefficients."""
