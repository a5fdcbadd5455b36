"""Exception types shared across the package."""


class TvcspError(Exception):
    """Base class for all package-specific errors."""


class CapacityError(TvcspError):
    """A configured size cap would be exceeded.

    Always names the cap and the offending size so callers can decide
    whether to raise the cap via configuration.
    """

    def __init__(self, what: str, size: int, cap_name: str, cap: int):
        self.what = what
        self.size = size
        self.cap_name = cap_name
        self.cap = cap
        super().__init__(f"{what} needs size {size}, above {cap_name}={cap}")


class PreconditionError(TvcspError):
    """An operation was invoked on inputs outside its contract."""


class UnsupportedClassError(TvcspError):
    """A specialized backend cannot handle the given constraint language."""


class InvariantViolation(TvcspError):
    """An internal consistency condition failed; indicates a broken caller
    precondition rather than bad user input."""


class ParseError(TvcspError):
    """Syntax or validation error in an input file, with position info."""

    def __init__(self, message: str, line: int, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")
