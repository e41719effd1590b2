"""Exception hierarchy.

Every domain error carries a stable ``name`` used by the CLI when reporting
failures, so callers can dispatch on it without importing the classes.
"""


class PolyheightError(Exception):
    """Base class for all domain errors raised by this package."""

    @property
    def name(self) -> str:
        return type(self).__name__


# polytope core
class DimensionMismatch(PolyheightError, ValueError):
    pass


class UnboundedRegion(PolyheightError, ValueError):
    pass


class EmptyRegion(PolyheightError, ValueError):
    pass


class BadDimension(PolyheightError, ValueError):
    pass


class NotFullDimensional(PolyheightError, ValueError):
    pass


class NotComplete(PolyheightError, ValueError):
    pass


# roofs
class NegativeHeight(PolyheightError, ValueError):
    pass


class PointOutsideDomain(PolyheightError, ValueError):
    pass


class MissingVertexHeight(PolyheightError, ValueError):
    pass


class IncompatibleFan(PolyheightError, ValueError):
    pass


class DomainMismatch(PolyheightError, ValueError):
    pass


# integration
class ArityMismatch(PolyheightError, ValueError):
    pass


# base ring
class InfinitySquared(PolyheightError, ValueError):
    pass


class MissingTableEntry(PolyheightError, ValueError):
    pass


class GradeMismatch(PolyheightError, ValueError):
    pass


class NotTopDegree(PolyheightError, ValueError):
    pass


class NotPSD(PolyheightError, ValueError):
    pass


class BadDimensions(PolyheightError, ValueError):
    pass


class TableConflict(PolyheightError, ValueError):
    """A degree-table entry contradicts a declared structural zero."""


# bkk
class WrongArity(PolyheightError, ValueError):
    pass


class UnknownRay(PolyheightError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


# minima
class NonConcaveOracle(PolyheightError, ValueError):
    pass


# semiabelian
class InconsistentRoutes(PolyheightError, RuntimeError):
    """The two height routes disagree; this always indicates a bug."""


# cli
class SchemaError(PolyheightError, ValueError):
    def __init__(self, message: str, pointer: str = ""):
        super().__init__(message)
        self.pointer = pointer
