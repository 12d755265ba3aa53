"""Exception hierarchy shared by all surftri modules."""


class SurfaceMapError(ValueError):
    """Base class for every error raised by this package."""


# construction / parsing
class NonMutualAdjacency(SurfaceMapError):
    pass


class DuplicateNeighbor(SurfaceMapError):
    pass


class LoopEdge(SurfaceMapError):
    pass


class InvalidVertex(SurfaceMapError):
    pass


class BadHoleAnchor(SurfaceMapError):
    pass


class ParseError(SurfaceMapError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DisconnectedMap(SurfaceMapError):
    pass


class NotATriangulation(SurfaceMapError):
    pass


class SurgeryError(SurfaceMapError):
    """Cutting produced a degenerate (non-simple) map."""


# cycles and topology
class NotACycle(SurfaceMapError):
    pass


class CycleTouchesItself(NotACycle):
    pass


class CyclesShareVertex(SurfaceMapError):
    pass


class CycleContractible(SurfaceMapError):
    pass


class MapHasHoles(SurfaceMapError):
    pass


class SphereHasNone(SurfaceMapError):
    pass


# search outcomes
class NotFound(SurfaceMapError):
    """A heuristic or exhaustive search came back empty.

    ``tried`` counts candidates examined, ``stage`` is the handle index for
    multi-stage searches, ``exhaustive`` tells whether absence is certified.
    """

    def __init__(self, message, *, tried=None, stage=None, exhaustive=False):
        super().__init__(message)
        self.tried = tried
        self.stage = stage
        self.exhaustive = exhaustive


class BudgetExceeded(SurfaceMapError):
    def __init__(self, message, *, nodes=None):
        super().__init__(message)
        self.nodes = nodes


class NoExpansionMove(SurfaceMapError):
    pass


class NoShrinkMove(SurfaceMapError):
    pass


class NotATorus(SurfaceMapError):
    pass


class VerifierRejected(SurfaceMapError):
    pass


# generators
class GridTooSmall(SurfaceMapError):
    pass


class AnchorNotTriangle(SurfaceMapError):
    pass


class NonOrientableInput(SurfaceMapError):
    pass


class NotAFaceSubdivision(SurfaceMapError):
    pass


class NonSimpleHoleBoundary(SurfaceMapError):
    pass
