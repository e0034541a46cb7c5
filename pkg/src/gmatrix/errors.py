"""Exception types raised across the package."""


class GMatrixError(Exception):
    """Base class for all package errors."""


class SpaceError(GMatrixError, ValueError):
    """Invalid space description (weights, metric, resolution)."""


class SpaceMismatch(GMatrixError, ValueError):
    """Operands live on different spaces."""


class NoDeltaPrime(GMatrixError):
    """No outer radius passed the annulus test at this resolution."""


class UnitNotAvailable(GMatrixError):
    """The algebra has no unit on this space (infinite kind or null weights)."""


class ConditionFailed(GMatrixError):
    """A metric-measure hypothesis (C1 or C2) failed; carries the witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DisjointBallsImpossible(GMatrixError):
    """No admissible radius separates the chosen centers."""


class NotMeasurePreserving(GMatrixError, ValueError):
    """A node map does not push the source weights onto the target weights."""


class SupportViolation(GMatrixError, ValueError):
    """Weight lies outside a subset that was required to carry all of it."""


class FactorizationOverflow(GMatrixError):
    """A kernel factorization needed more terms than there are nodes."""
