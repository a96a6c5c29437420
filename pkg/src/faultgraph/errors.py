"""Exception types shared across the toolchain.

Every error raised on bad *input* derives from InputError so the CLI can map
it to exit code 1; anything else escaping a stage is treated as an internal
fault (exit code 2).
"""


class FaultgraphError(Exception):
    """Base class for all toolchain errors."""


class InputError(FaultgraphError):
    """Problem with user-supplied data or configuration."""


class ParseError(InputError):
    """Source text outside the supported Java subset.

    Carries 1-based line/column of the offending token when known.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{message} ({where})"
        super().__init__(message)


class FormatError(InputError):
    """Malformed record in a structured input file (facts file, commit log, registry)."""

    def __init__(self, message: str, record: int | None = None):
        self.record = record
        if record is not None:
            message = f"record {record}: {message}"
        super().__init__(message)


class ConfigError(InputError):
    """Invalid or incomplete pipeline configuration."""


class EmptyInput(InputError):
    """An operation received an empty sample set."""


class InsufficientTail(InputError):
    """Too few (or degenerate) tail samples for a power-law fit."""


class DomainError(InputError):
    """Argument outside the mathematical domain of an operation."""


class DegenerateInput(InputError):
    """Statistical input without enough variation (zero variance, length mismatch)."""


class DegenerateTable(InputError):
    """Contingency table with a zero row or column marginal."""


class EmptyFamily(InputError):
    """A CU family required to be non-empty is empty."""


class UnknownMetric(InputError):
    """Metric name not in the per-CU metric vector."""
