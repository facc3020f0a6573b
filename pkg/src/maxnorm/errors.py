"""Exception types raised across the package."""


class MaxnormError(Exception):
    """Base class for all errors raised by this package."""


class ShapeMismatch(MaxnormError, ValueError):
    pass


class InvalidRank(MaxnormError, ValueError):
    pass


class InvalidEps(MaxnormError, ValueError):
    pass


class InvalidBracket(MaxnormError, ValueError):
    pass


class InvalidBand(MaxnormError, ValueError):
    pass


class NotPowerOfTwo(MaxnormError, ValueError):
    pass


class ZeroMatrix(MaxnormError, ValueError):
    pass


class NotOrthonormal(MaxnormError, ValueError):
    pass


class EmptyInput(MaxnormError, ValueError):
    pass


class RankDeficient(MaxnormError, ArithmeticError):
    """QR found a diagonal entry of R below the rank tolerance."""

    def __init__(self, msg, column=None):
        super().__init__(msg)
        self.column = column


class NoConvergence(MaxnormError, ArithmeticError):
    """An iterative kernel hit its iteration cap.

    ``estimate`` carries the best value reached before giving up.
    """

    def __init__(self, msg, estimate=None):
        super().__init__(msg)
        self.estimate = estimate
