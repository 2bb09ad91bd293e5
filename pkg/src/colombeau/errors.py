"""Exception hierarchy shared by all modules."""


class ColombeauError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ColombeauError, ValueError):
    """A point lies outside the domain of a net or map."""


class CapabilityError(ColombeauError):
    """A requested derivative order or construction is not supported."""


class ShapeError(ColombeauError, ValueError):
    """Operands have incompatible domains, dimensions or scalar kinds."""


class EvaluationError(ColombeauError):
    """A net produced a non-finite value where a finite one was required."""

    def __init__(self, message, *, box=None, alpha=None, eps=None):
        super().__init__(message)
        self.box = box
        self.alpha = alpha
        self.eps = eps


class IntegrationError(ColombeauError):
    """A quadrature did not converge."""


class InsufficientPrecisionError(ColombeauError):
    """Truncated coefficients cannot separate the requested information."""

    def __init__(self, message, exponent=None):
        super().__init__(message)
        self.exponent = exponent


class NotASquareError(ColombeauError, ValueError):
    """Square root requested of a negative real asymptotic number."""


class ConsistencyError(ColombeauError):
    """Face data or a cell complex fails its gluing conditions."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class PreconditionError(ColombeauError):
    """An operation's documented precondition does not hold."""


class ParseError(ColombeauError, ValueError):
    """Malformed text input."""
