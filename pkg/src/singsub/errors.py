"""Exception types raised by the solvers."""


class SingsubError(Exception):
    """Base class for all errors raised by this package."""


class KernelDomainError(SingsubError, ValueError):
    """A kernel was evaluated outside ``[0, b - a]``."""


class NoClosedFormError(SingsubError):
    """The kernel carries neither a primitive nor a closed-form line integral."""


class SolverError(SingsubError):
    """A solver failed at a given iteration.

    ``iteration`` is the Newton step during which the failure occurred.
    """

    def __init__(self, message, iteration=None):
        if iteration is not None:
            message = f"iteration {iteration}: {message}"
        super().__init__(message)
        self.iteration = iteration


class SingularMatrixError(SolverError):
    pass


class DivergenceError(SolverError):
    pass


class InterpolationDegeneracyError(SolverError):
    """The natural interpolation denominator dropped to 1/2 or below."""

    def __init__(self, message, s=None, iteration=None):
        super().__init__(message, iteration=iteration)
        self.s = s
