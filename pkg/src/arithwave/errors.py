"""Exception hierarchy shared by all modules.

The CLI maps :class:`ArgumentError` to exit code 2 and :class:`ResourceError`
to exit code 3.
"""


class ArithwaveError(Exception):
    """Base class for every error raised by the package."""


class ArgumentError(ArithwaveError, ValueError):
    """Invalid input that no amount of resources would fix."""


class RangeError(ArgumentError):
    """An integer input or intermediate exceeds the configured width."""


class DegenerateInputError(ArgumentError):
    """Input is valid but the requested quantity is undefined for it."""


class ResourceError(ArithwaveError, RuntimeError):
    """A configured work budget would be exceeded."""


class QuadratureError(ResourceError):
    """Adaptive quadrature could not reach the requested tolerance."""


class NotFoundError(ResourceError, LookupError):
    """A bounded search finished without a match.

    ``best`` holds the closest candidate seen, or ``None``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class SingularityError(ArithwaveError, ArithmeticError):
    """Evaluation point is too close to a singularity of the formula."""
