"""Exception hierarchy for the interpolation pipeline."""


class CurveError(ValueError):
    """Base class for every error raised by gcurve."""


class ZeroSpeed(CurveError):
    pass


class DegenerateChord(CurveError):
    pass


class Collinear(CurveError):
    pass


class NotFlattenable(CurveError):
    pass


class NoSolution(CurveError):
    pass


class NotConvex(CurveError):
    pass


class InvalidDomain(CurveError):
    pass


class SpanMismatch(CurveError):
    pass


class OffSphereData(CurveError):
    pass


class AntipodalChord(CurveError):
    pass


class EndpointMismatch(CurveError):
    pass


class OutOfDomain(CurveError):
    pass


class ParseError(CurveError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)
        self.line = line
        self.column = column


class DimensionMismatch(CurveError):
    pass


class DuplicateConsecutivePoints(CurveError):
    pass


class UnsupportedDimension(CurveError):
    pass


class BadParams(CurveError):
    pass
