class TunnelersError(Exception):
    """
    Base class for all errors raised by tunnelers
    """


class ConfigurationError(TunnelersError, ValueError):
    """
    Raised when a parameter violates its constraint or a configuration key is unknown
    """


class PhaseUnwrapError(TunnelersError, ArithmeticError):
    """
    Raised when the phase jumps by pi/2 or more across a finite difference stencil
    """


class StepAdaptationError(TunnelersError, ArithmeticError):
    """
    Raised when the one-sided derivative estimates never agree within tolerance
    """


class NonConservationError(TunnelersError, ArithmeticError):
    """
    Raised when P1 + P2 + P3 departs from 1 by more than the conservation budget
    """


class TailTruncationError(TunnelersError, ArithmeticError):
    """
    Raised when the analytic tail correction of a time integral is too large compared to its finite part
    """


class GateError(TunnelersError, ValueError):
    """
    Raised when epsilon lies outside (0, tau_D)
    """


class FitError(TunnelersError, ValueError):
    """
    Raised when an exponential tail cannot be fitted
    """


class ZeroSearchError(TunnelersError, RuntimeError):
    """
    Raised when the complex zero search finds nothing usable
    """


class ContourError(TunnelersError, RuntimeError):
    """
    Raised when the argument principle integral is not close to an integer
    """


class StageError(TunnelersError, RuntimeError):
    """
    Raised by the pipeline when one of its stages fails
    """

    def __init__(self, stage: str, error: Exception):
        super().__init__(f'stage {stage!r} failed: {error.__class__.__name__}: {error}')
        self.stage = stage
        self.error = error
