"""Exception types shared across the toolkit."""


class NcpitError(Exception):
    """Base class for all toolkit errors."""


class ParseError(NcpitError):
    """Circuit file does not conform to the .ncc grammar."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class BudgetError(NcpitError):
    """An expansion exceeded its term or degree budget.

    ``kind`` is ``"terms"`` or ``"degree"``.
    """

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class CapacityError(NcpitError):
    """Requested parameters exceed what word-sized arithmetic supports."""


class FieldSizeError(NcpitError):
    """The field is too small for the requested randomized test."""


class StructureError(NcpitError):
    """A circuit violates a structural assumption of the algorithm."""
