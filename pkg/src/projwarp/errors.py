class ProjwarpError(Exception):
    """Base class for library errors."""


class NumericError(ProjwarpError, ValueError):
    """Degenerate geometry or arithmetic (CLI exit code 3)."""


class SingularMatrixError(NumericError):
    pass


class HorizonError(NumericError):
    """A projective denominator vanishes (or changes sign) where it is evaluated."""


class DegenerateReferenceError(NumericError):
    pass


class OutOfExtentError(ProjwarpError, ValueError):
    pass


class DataError(ProjwarpError, ValueError):
    """Malformed input data (CLI exit code 2)."""


class ImageFormatError(DataError):
    pass
