"""Exception types raised across the package."""


class TropMLBNError(Exception):
    """Base class for all package errors."""


class NegativeCycle(TropMLBNError):
    """The Kleene star series diverges."""


class DimensionMismatch(TropMLBNError, ValueError):
    pass


class InfiniteCoordinate(TropMLBNError, ValueError):
    pass


class EmptySample(TropMLBNError, ValueError):
    pass


class PointOutside(TropMLBNError, ValueError):
    pass


class Degenerate(TropMLBNError):
    """Two oriented spanning trees produced the same vertex."""


class InvalidProbability(TropMLBNError, ValueError):
    pass


class InvalidInterval(TropMLBNError, ValueError):
    pass


class UnrealizableCell(TropMLBNError, ValueError):
    pass


class TooFewObservations(TropMLBNError, ValueError):
    pass


class UncoverableElement(TropMLBNError, ValueError):
    pass


class ConfigError(TropMLBNError, ValueError):
    pass


class DataError(TropMLBNError, ValueError):
    """Malformed or unusable input data (CSV parsing, all rows dropped)."""


class ParseError(DataError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class AllRowsDropped(DataError):
    pass
