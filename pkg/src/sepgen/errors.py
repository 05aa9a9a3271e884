"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class SepgenError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InvalidInput(SepgenError, ValueError):
    exit_code = 2


class FieldMismatch(InvalidInput):
    """Raised when elements of two different fields meet in one operation."""


class Infeasible(SepgenError):
    """An exhaustive task would exceed the enumeration guard."""

    exit_code = 3

    def __init__(self, what: str, size: int, guard: int):
        self.what = what
        self.size = size
        self.guard = guard
        super().__init__(f"infeasible: {what} needs {size} items, guard is {guard}")


class IntegralityError(SepgenError, ArithmeticError):
    """A quantity that must be an exact integer (or a multiple of something) was not.

    Always an implementation bug, never bad input.
    """

    exit_code = 4
