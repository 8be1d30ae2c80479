"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`TsrError`,
so callers (the CLI in particular) can map families of failures onto exit
codes without catching unrelated bugs.
"""


class TsrError(Exception):
    """Base class for all library errors."""


class ConfigurationError(TsrError, ValueError):
    """Invalid user input: parameters, grid sizes, config fields."""


class InvalidGridError(ConfigurationError):
    """Collocation grid with even or too small point count."""


class DimensionError(ConfigurationError):
    """Array shapes that do not match the grid or the system."""


class AliasingError(ConfigurationError):
    """Request for harmonics the sampling grid cannot resolve."""


class NumericalError(TsrError, ArithmeticError):
    """A numerical procedure failed (non-convergence, singular operator)."""


class OrbitSolveError(NumericalError):
    """Newton iteration for the periodic orbit did not converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InvalidBaseFlowError(NumericalError):
    """Requested base flow is not an equilibrium/orbit of the system."""


class ResonanceError(NumericalError):
    """The full TSR operator is numerically singular at this frequency."""


class SingularShiftError(NumericalError):
    """Shifted Jacobian is singular (classical or harmonic resolvent)."""


class ZeroGainError(NumericalError):
    """Operation needs a positive gain."""


class DegenerateOrbitError(NumericalError):
    """Orbit tangent vanishes (the base flow is an equilibrium)."""


class IterativeSolveError(NumericalError):
    """Krylov solve did not reach its tolerance."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = list(residuals) if residuals is not None else []


class AdjointSolveError(IterativeSolveError):
    """Bordered solve for the adjoint neutral mode stagnated."""


class PreconditionerError(NumericalError):
    """Sparse factorization of the preconditioner failed."""


class StiffnessError(NumericalError):
    """Time integrator step size underflow."""


class SettleError(NumericalError):
    """Forced response had not reached a statistically steady state."""


class InsufficientSpanError(ConfigurationError):
    """Integration record too short for the requested analysis."""


class ToleranceViolation(TsrError):
    """A validation comparison exceeded its tolerance."""
