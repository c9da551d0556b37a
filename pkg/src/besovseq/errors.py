"""Exception types raised by the numerical routines."""


class BesovSeqError(Exception):
    """Base class for all package errors."""


class ShapeMismatch(BesovSeqError, ValueError):
    """Two sequences do not share the same pyramid layout."""


class DegenerateWindow(BesovSeqError):
    """Only one non-zero block inside the estimation window: no slope exists."""


class SeparationTooSmall(BesovSeqError):
    """Two curves are too close at a grid point to test the min rule there."""


class InsufficientData(BesovSeqError):
    """Not enough positive approximation errors to fit a decay exponent."""


class HypothesisViolated(BesovSeqError):
    """The critical curve does not exceed the target smoothness at p0."""


class GridTooShort(BesovSeqError):
    """The intersection with the compressibility line lies beyond the u-grid."""
