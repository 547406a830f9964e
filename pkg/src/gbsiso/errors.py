"""Exception types shared across the package."""


class GbsIsoError(Exception):
    """Base class for all package errors."""


class GraphFormatError(GbsIsoError, ValueError):
    """Raised when graph text (graph6 or edge list) cannot be decoded."""


class EncodingError(GbsIsoError, ValueError):
    """Raised when an adjacency matrix cannot be mapped onto a sampler."""


class NumericError(GbsIsoError, ArithmeticError):
    """Raised when a numerical routine loses the accuracy it promises."""


class GuardError(GbsIsoError, ValueError):
    """Raised when a size guard on an exponential routine is violated."""


class OracleInconclusive(GbsIsoError):
    """Raised when the truncated Fock oracle cannot certify its own value."""


class EnumerationCapExceeded(GbsIsoError):
    """Raised when candidate enumeration exceeds its node budget."""
