"""Exception taxonomy.

ValidationError / DomainError signal bad inputs or formula preconditions
(CLI exit code 1); SolverError and IntegrationError signal numerical
failures (CLI exit code 2).
"""


class ValidationError(ValueError):
    """Invalid input value; message names the offending field."""


class DomainError(ValueError):
    """A formula precondition is violated (for example delta_L + delta_sag <= 0)."""


class SolverError(RuntimeError):
    """Fixed-point solver failed to converge."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class MultistableRegimeError(SolverError):
    """Seed scan found more than one steady-state attractor."""

    def __init__(self, message, fixed_points=None):
        super().__init__(message)
        self.fixed_points = fixed_points


class IntegrationError(RuntimeError):
    """Adaptive integrator failed (step-size underflow)."""

    def __init__(self, message, time_reached=None, accepted=None, rejected=None):
        super().__init__(message)
        self.time_reached = time_reached
        self.accepted = accepted
        self.rejected = rejected


class DivergenceError(IntegrationError):
    """Trajectory left the finite domain."""


class EstimationError(ValueError):
    """Growth-rate fit could not be performed on the given window."""


class BracketError(ValueError):
    """Power grid does not bracket a sign change of the growth rate."""
