class SchurLabError(Exception):
    """Base class for every error raised by schurlab."""


class ArgumentError(SchurLabError, ValueError):
    pass


class DimensionError(SchurLabError, ValueError):
    pass


class DegenerateError(SchurLabError, ValueError):
    """Rank-deficient or coincident input."""


class DomainError(SchurLabError, ValueError):
    """Input outside the region where an operation is defined."""


class ClassificationError(SchurLabError, ValueError):
    """A point expected on a body's boundary is interior or exterior."""


class ConstructionError(SchurLabError):
    """A construction failed one of its margin checks."""

    def __init__(self, message, margins=None):
        super().__init__(message)
        self.margins = margins or {}


class SamplingError(SchurLabError):
    pass


class CaseError(SchurLabError, ValueError):
    """Preconditions of the rotation procedure are not met."""


class ProcedureError(SchurLabError):
    pass


class ToleranceArtifactError(SchurLabError):
    """A result exceeds a proven bound; almost certainly a tolerance artifact."""
