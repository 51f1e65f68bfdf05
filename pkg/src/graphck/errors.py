"""Exception types shared across the toolkit.

Exit-code mapping used by the CLI: ContractViolation and DslError are
usage-level errors (exit 2), ResourceLimit is exit 3.  Verification
failures are ordinary results, never exceptions.
"""


class GraphckError(Exception):
    """Base class for all toolkit errors."""


class ContractViolation(GraphckError):
    """A documented precondition of an operation was violated."""


class ResourceLimit(GraphckError):
    """A configurable size bound was exceeded."""


class DslError(GraphckError):
    """Syntax or semantic error in the graph DSL."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} at line {line}" + (f", column {column}" if column else "")
        super().__init__(message)
