"""Exception hierarchy shared by every module of the package."""


class UmbrellaError(Exception):
    """Base class for all package errors."""


class InvalidInput(UmbrellaError, ValueError):
    """Input violates a documented precondition."""


class ZeroEntry(InvalidInput):
    """A coefficient matrix entry is zero."""


class DimensionMismatch(InvalidInput):
    """Coefficient rows and central points disagree in count, or shapes are wrong."""


class InvalidParams(InvalidInput):
    """Parameters of a special mapping form are out of range."""


class ZeroPolynomial(InvalidInput):
    """Root finding was asked for the identically zero polynomial."""


class DegenerateGradient(UmbrellaError, ArithmeticError):
    """A conic gradient vanishes at the query point, so tangency is undefined."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class NotRankOne(UmbrellaError, ArithmeticError):
    """Cross-cap recognition needs a Jacobian of rank exactly one."""


class SolverInconsistency(UmbrellaError, RuntimeError):
    """Newton refinement diverged from every resultant candidate."""

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)
