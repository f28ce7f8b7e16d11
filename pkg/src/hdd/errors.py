"""Exception hierarchy shared by every module of the package."""


class HDDError(Exception):
    """Base class for all errors raised by :mod:`hdd`."""


class InvalidPointSet(HDDError, ValueError):
    """Point data violates a PointSet invariant (NaN, n < d, ...)."""


class DegenerateError(HDDError):
    """The d points given do not span a unique hyperplane."""


class SingularError(HDDError):
    """A linear system built from hyperplane normals has no unique solution."""


class OnBoundaryError(HDDError):
    """A sign vector has a zero entry, so no open cell is defined."""


class OnLineError(HDDError):
    """A query point lies (within tolerance) on an arrangement line."""


class UnboundedError(HDDError):
    """Depth restricted to a line has no breakpoint to minimize over."""


class NoCandidatesError(HDDError):
    """Every candidate subset of hyperplanes was singular."""


class NoIntersectionsError(HDDError):
    """A probe line is parallel to every line of the family."""


class ParseError(HDDError, ValueError):
    """Malformed point file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DimensionMismatch(ParseError):
    """A row has a different number of coordinates than the point set."""
