"""Typed errors raised across the itembound package."""

from typing import Optional


class ItemboundError(Exception):
    """Base class for every error raised by itembound."""


class ConfigurationError(ItemboundError, ValueError):
    """An environment setting could not be parsed."""


class EmptyDataError(ItemboundError, ValueError):
    """A transaction database without rows was used where rows are needed."""


class DomainMismatchError(ItemboundError, ValueError):
    """Itemsets, distributions or assignments refer to incompatible attribute sets."""


class UnknownAttributeError(ItemboundError, KeyError):
    """An attribute name is not part of the active universe."""

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"unknown attribute '{self.name}'"


class FamilyFormatError(ItemboundError, ValueError):
    """A family+frequency file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class QuerySyntaxError(ItemboundError, ValueError):
    """A boolean query could not be parsed."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnboundVariableError(ItemboundError, KeyError):
    """A formula was evaluated without a value for one of its variables."""

    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"variable '{self.name}' has no value"


class InconsistentFrequenciesError(ItemboundError, ValueError):
    """No distribution satisfies the given frequencies."""

    def __init__(self, message: str, projection=None):
        super().__init__(message)
        self.projection = projection


class NotViolatingError(ItemboundError, ValueError):
    """A min-cut was requested for an item whose frontier is in the family."""


class NotChordalError(ItemboundError, ValueError):
    """A chordal graph was required."""


class PreconditionError(ItemboundError, ValueError):
    """The input does not meet the structural assumptions of an operation."""
