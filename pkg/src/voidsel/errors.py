"""Exception and warning types shared across the package."""


class VoidselError(Exception):
    """Base class for all errors raised by voidsel."""


class GeometryError(VoidselError, ValueError):
    pass


class CollinearPoints(GeometryError):
    pass


class DegeneratePair(GeometryError):
    pass


class EmptyInput(VoidselError, ValueError):
    pass


class NotOnBoundary(GeometryError):
    pass


class OutsideDomain(GeometryError):
    pass


class DomainMismatch(VoidselError, ValueError):
    pass


class InvalidRadius(VoidselError, ValueError):
    pass


class InvalidDistance(VoidselError, ValueError):
    pass


class InvalidK(VoidselError, ValueError):
    pass


class NotGabrielPair(VoidselError, ValueError):
    pass


class NoTangentPairs(VoidselError, ValueError):
    pass


class NotHighDimensional(VoidselError, ValueError):
    pass


class EmptyPrototypes(VoidselError, ValueError):
    pass


class ZeroWeights(VoidselError, ValueError):
    pass


class DataError(VoidselError):
    """Problems with an input dataset (parsing, missing columns, bad values)."""


class ParseError(DataError, ValueError):
    pass


class MissingLabelColumn(DataError, KeyError):
    pass


class NegativeFeatures(DataError, ValueError):
    pass


class TooFewRows(DataError, ValueError):
    pass


class DegenerateExtentWarning(UserWarning):
    pass


class DuplicateSitesWarning(UserWarning):
    pass


class OverlappingBoundariesWarning(UserWarning):
    pass


class MissingValuesWarning(UserWarning):
    pass


class DegenerateCovarianceWarning(UserWarning):
    pass
