"""Exception hierarchy shared by all pipeline stages."""


class ImpactError(Exception):
    """Base class for errors raised by this package."""


class InvalidParameterError(ImpactError, ValueError):
    """A parameter is outside its allowed range."""


class DataError(ImpactError, ValueError):
    """Input data is malformed, misaligned or incomplete."""


class AlignmentError(DataError):
    """Forced and counterfactual members cannot be paired."""


class IngestError(DataError):
    """A CSV input violates the ingest schema."""


class EmptyRegionError(DataError):
    """A region in a mask has no assigned columns."""


class NumericalUnderflowError(ImpactError, ArithmeticError):
    """A fuzzy similarity average underflowed to exactly zero."""


class UnknownNodeError(ImpactError, KeyError):
    """A node identifier is not part of the graph."""


class PathNotFoundError(ImpactError):
    """No path connects the requested source and final nodes."""


class ConfigError(ImpactError, ValueError):
    """A configuration file or table is invalid."""
