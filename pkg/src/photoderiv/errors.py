"""Exception hierarchy shared by all photoderiv modules."""


class PhotoderivError(Exception):
    """Base class for all domain errors raised by this package."""


class OutOfRange(PhotoderivError):
    """A parameter lies outside its physical range (e.g. y >= 0.5)."""


class NotFinite(PhotoderivError):
    """A numeric input is NaN or infinite."""


class Overflow(PhotoderivError):
    """A value cannot be represented even in log domain (practically unreachable)."""


class TruncationFailure(PhotoderivError):
    """A series or distribution could not be truncated within its error budget."""


class UnsupportedK(PhotoderivError):
    """No closed form is implemented for this input photon number (k >= 3)."""


class SingularPoint(PhotoderivError):
    """The requested closed form is singular at this parameter point."""


class TruncationTooSmall(PhotoderivError):
    """The requested Fock-space truncation drops more input mass than allowed."""


class ZeroProbabilityOutcome(PhotoderivError):
    """Conditioning on an outcome of zero probability."""


class IncompatibleTruncation(PhotoderivError):
    """Two states cannot be embedded in a common truncated basis."""


class UsageError(PhotoderivError):
    """Invalid command-line invocation."""
