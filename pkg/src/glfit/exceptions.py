"""Exception hierarchy shared by every glfit module."""


class GLFitError(Exception):
    """Base class for all glfit errors."""


class DomainError(GLFitError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateDataError(GLFitError, ValueError):
    """The data carry no spread (zero variance, or max equal to min)."""


class SampleSizeError(GLFitError, ValueError):
    """Too few observations, an empty grid, or a size cap exceeded."""


class ParseError(GLFitError, ValueError):
    """A token in an input stream could not be read as a number."""

    def __init__(self, token, line, column):
        self.token = token
        self.line = line
        self.column = column
        super().__init__(
            f"cannot parse {token!r} as a number at line {line}, column {column}"
        )


class BracketError(GLFitError, ValueError):
    """A search interval is empty or reversed."""


class DisagreementOverflow(GLFitError, ArithmeticError):
    """A disagreement term exceeded the floating point range."""
