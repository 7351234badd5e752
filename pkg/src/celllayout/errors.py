"""Exception hierarchy shared by the whole package."""


class CellLayoutError(Exception):
    """Base class for every error raised by :mod:`celllayout`."""


class UnknownRatingLetter(CellLayoutError, ValueError):
    def __init__(self, letter):
        self.letter = letter
        super().__init__(f"unknown closeness rating letter {letter!r} (expected one of A, E, I, O, U, X)")


class DegenerateMatrix(CellLayoutError, ValueError):
    """Raised when a matrix with zero grand total is normalized."""


class ParseError(CellLayoutError, ValueError):
    def __init__(self, reason, line=None):
        self.reason = reason
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{reason}")


class InvalidInstance(CellLayoutError, ValueError):
    """An instance violates one or more model invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InvalidGeneratorArgs(CellLayoutError, ValueError):
    pass


class DimensionMismatch(CellLayoutError, ValueError):
    pass


class InvalidPermutation(CellLayoutError, ValueError):
    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class IndexOutOfRange(CellLayoutError, IndexError):
    pass


class SameIndex(CellLayoutError, ValueError):
    pass


class InstanceTooLarge(CellLayoutError, ValueError):
    pass


class InvalidParams(CellLayoutError, ValueError):
    pass
