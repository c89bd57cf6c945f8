"""Exception types shared across the library."""


class YoungflowError(Exception):
    """Base class for all library errors."""


class ParameterError(YoungflowError):
    """An argument is outside its admissible range (p < 1, bad exponent, ...)."""


class DomainError(YoungflowError):
    """A window or evaluation point lies outside a path's time domain."""


class ShapeError(YoungflowError):
    """Array dimensions of integrand/driver/state do not fit together."""


class JoinError(YoungflowError):
    """Concatenation endpoints do not match in time or value."""


class SizeError(YoungflowError):
    """Input too large for an exhaustive reference computation."""


class RegularityError(YoungflowError):
    """Variation exponents violate 1/p + 1/q > 1."""


class DataError(YoungflowError):
    """Non-finite or otherwise unusable numerical data."""


class PreconditionError(YoungflowError):
    """A documented precondition of an operation does not hold."""


class InfeasibleExponentsError(ParameterError):
    """The exponent inequalities admit no solution; names the violated one."""


class GreedyExhausted(YoungflowError):
    """Greedy-time construction was asked to continue past the domain end."""


class SolveError(YoungflowError):
    """Picard iteration failed on an interval even after repeated shrinking."""

    def __init__(self, message, window=None):
        super().__init__(message)
        self.window = window
