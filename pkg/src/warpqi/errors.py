"""Exception hierarchy shared by every warpqi module."""


class WarpQIError(Exception):
    """Base class for all errors raised by warpqi."""


# geometry
class FewerThanThreePoints(WarpQIError, ValueError):
    pass


class AllPointsCollinear(WarpQIError, ValueError):
    pass


class NegativeSideLength(WarpQIError, ValueError):
    pass


class TriangleInequalityViolated(WarpQIError, ValueError):
    pass


# metrics
class AllAreasZero(WarpQIError, ValueError):
    pass


class AllDistancesZero(WarpQIError, ValueError):
    pass


class KTooLarge(WarpQIError, ValueError):
    pass


class SizeMismatch(WarpQIError, ValueError):
    pass


# data
class ParseError(WarpQIError, ValueError):
    def __init__(self, message, row=None, col=None):
        super().__init__(message)
        self.row = row
        self.col = col


class RaggedRows(ParseError):
    pass


class NonFinite(WarpQIError, ValueError):
    pass


class WrongColumnCount(ParseError):
    pass


class NotSquare(WarpQIError, ValueError):
    pass


class NotSymmetric(WarpQIError, ValueError):
    pass


class NegativeEntry(WarpQIError, ValueError):
    pass


class NonZeroDiagonal(WarpQIError, ValueError):
    pass


# projectors
class PerplexityTooLarge(WarpQIError, ValueError):
    pass


# render
class EmptyTriangulation(WarpQIError, ValueError):
    pass


class DegenerateCovariance(UserWarning):
    """PCA found fewer informative directions than requested."""


class CalibrationFailed(UserWarning):
    """Perplexity bisection could not reach the target entropy for some rows."""
