"""Exception hierarchy shared by all modules."""


class KTTError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(KTTError, ValueError):
    pass


class InfeasibleMomentsError(KTTError, ValueError):
    """The (M, V) pair lies outside the family's reachable region."""


class UndefinedMomentError(InvalidInputError):
    """A requested moment does not exist (e.g. GEV variance for xi >= 0.5)."""


class NumericFailureError(KTTError, ArithmeticError):
    pass


class FitFailureError(KTTError):
    """Clothoid G1 fit did not converge."""


class OutOfRangeError(KTTError, ValueError):
    pass


class DegenerateSampleError(KTTError, ValueError):
    pass


class ExtractionError(KTTError):
    pass


class GenerationError(KTTError):
    pass


class ParseError(KTTError, ValueError):
    def __init__(self, message, line=None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line
        self.path = path


class UnsupportedVersionError(ParseError):
    pass


class UnsupportedKindError(ParseError):
    pass
