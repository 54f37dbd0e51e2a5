"""Exception hierarchy shared by all modules."""


class PVCohError(Exception):
    """Base class. ``code`` is the machine-readable name used in CLI error reports."""

    @property
    def code(self) -> str:
        return type(self).__name__


# abelian
class CompositionNotZero(PVCohError):
    pass


class EmptySystem(PVCohError):
    pass


class ShapeMismatch(PVCohError):
    pass


# tiling
class RationalAlpha(PVCohError):
    pass


class UncertifiedComparison(PVCohError):
    pass


class NonPrimitive(PVCohError):
    pass


class TooFewPoints(PVCohError):
    pass


class InsufficientSample(PVCohError):
    pass


# delta_complex
class DegreeOutOfRange(PVCohError):
    pass


class InvalidComplex(PVCohError):
    pass


class InvalidMap(PVCohError):
    pass


# approximants
class PatternNotFound(PVCohError):
    pass


class NotComparable(PVCohError):
    pass


# pv
class MissingConnectingMap(PVCohError):
    pass


class FaceOutOfRange(PVCohError):
    pass


# koszul
class ResolutionUnavailable(PVCohError):
    pass


# spectral
class NotExact(PVCohError):
    def __init__(self, node: str, detail: str = ""):
        self.node = node
        super().__init__(f"exactness fails at {node}" + (f": {detail}" if detail else ""))


class NotAMorphism(PVCohError):
    def __init__(self, square: str, detail: str = ""):
        self.square = square
        super().__init__(f"square {square} does not commute" + (f": {detail}" if detail else ""))
