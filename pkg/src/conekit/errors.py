"""Exception hierarchy shared by all conekit modules."""


class ConeKitError(Exception):
    """Base class for every error raised by conekit."""


class DimensionMismatch(ConeKitError, ValueError):
    pass


# linalg
class NoStrictDominance(ConeKitError):
    """Leading eigenvalue is complex, tied, or non-positive."""


class NoConvergence(ConeKitError):
    pass


# cone geometry
class NotPointed(ConeKitError):
    """The conic hull contains a line."""


class NotSolid(ConeKitError):
    """The facet system admits no interior point."""


class EmptyCone(ConeKitError):
    """No nonzero generator survived (the cone is {0})."""


# hilbert
class NotInCone(ConeKitError):
    pass


class ImageNotContained(ConeKitError):
    pass


# automaton
class AutomatonError(ConeKitError, ValueError):
    pass


class DanglingReference(AutomatonError):
    pass


class DeadState(AutomatonError):
    pass


# verify
class MissingCone(ConeKitError):
    pass


class InconsistentDimensions(ConeKitError, ValueError):
    pass


# search
class BasicTestFailed(ConeKitError):
    """Raised when the family fails the necessary eigenstructure test.

    ``offender`` holds the symbol (or symbol pair) responsible.
    """

    def __init__(self, message, offender=None):
        super().__init__(message)
        self.offender = offender


class ParallelPoints(ConeKitError):
    pass


class DegenerateSigns(ConeKitError):
    pass
