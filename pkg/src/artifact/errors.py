"""Exception types shared across the package."""
from __future__ import annotations


class ArtifactError(Exception):
    """Base class for library errors."""


class ShapeError(ArtifactError, ValueError):
    """Matrix dimensions do not agree."""


class StructureError(ArtifactError, ValueError):
    """A structure equation or invariant fails."""


class BoundednessError(ArtifactError, ValueError):
    """Neither side of a pairing is bounded."""


class ConventionError(ArtifactError, ValueError):
    """Input violates an input convention (for example a forbidden braid letter)."""


class FixtureError(ArtifactError):
    """A shipped fixture fails one of its defining identities."""


class CorrespondenceError(ArtifactError):
    """A state to generator correspondence is not well defined."""


class ArgumentError(ArtifactError, ValueError):
    """An argument does not fit the object it is applied to."""


class DiagramError(ArtifactError, ValueError):
    """A Heegaard diagram fails one of its structural invariants."""


class ParseError(ArtifactError, ValueError):
    """An input file or literal cannot be parsed; ``location`` points at the offending part."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
