"""Exception types raised by cilab.

Every error is a ``ValueError`` subclass so callers that only care about
"bad input" can catch that.
"""


class CILabError(ValueError):
    """Base class for all cilab errors."""


class NonPositivePivot(CILabError):
    """The (1,1) entry is not strictly positive, so no Schur complement exists."""


class NegativeDensity(CILabError):
    pass


class DimensionMismatch(CILabError):
    pass


class NotPSD(CILabError):
    """A matrix argument failed the positive semi-definite test."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"argument {index} is not positive semi-definite")


class NotPSDField(CILabError):
    pass


class GridMismatch(CILabError):
    pass


class ZeroDivMass(CILabError):
    pass


class ZeroRowMass(CILabError):
    def __init__(self, row):
        self.row = row
        super().__init__(f"divergence row {row} has zero mass")


class SingularOnNode(CILabError):
    """A kernel singularity coincides with a quadrature node."""


class DegenerateDirection(CILabError):
    pass


class NegativeState(CILabError):
    def __init__(self, field, index):
        self.field = field
        self.index = index
        super().__init__(f"negative {field} at cell {index}")


class NotAdmissible(CILabError):
    pass


class ZeroEnergy(CILabError):
    pass


class CharacteristicCrossing(CILabError):
    def __init__(self, time):
        self.time = time
        super().__init__(f"characteristics cross at t={time!r}")


class SupportReachedBoundary(CILabError):
    def __init__(self, step=None, time=None):
        self.step = step
        self.time = time
        super().__init__(f"flow support reached the box boundary (step={step}, t={time})")


class NonPhysicalState(CILabError):
    def __init__(self, step, what):
        self.step = step
        super().__init__(f"non-physical state after step {step}: {what}")


class BelowResolution(CILabError):
    pass


class MalformedFile(CILabError):
    """A DBV1, FLW1 or config file does not follow its format."""
