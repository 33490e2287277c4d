"""Exception hierarchy shared by all modules.

Every error carries enough context to be reported by the CLI with a
distinct exit code: parse errors (2), semantic errors (3), precondition
violations (4), and internal invariant breaches (5, always a bug).
"""


class SvdistError(Exception):
    """Base class for all package errors."""


class DomainError(SvdistError):
    """A point or parameter lies outside the domain of the operation."""


class ContractError(SvdistError):
    """Caller violated an operation's stated preconditions."""


class ChainRejected(SvdistError):
    """A polygonal chain failed validation.

    `segment` is the 0-based index of the first offending segment when the
    violation is attributable to one, else None.
    """

    def __init__(self, reason: str, segment: int | None = None):
        self.reason = reason
        self.segment = segment
        msg = reason if segment is None else f"{reason} (segment {segment})"
        super().__init__(msg)


class PreconditionError(SvdistError):
    """A scenario-level hypothesis does not hold (e.g. positivity of the
    lower approximate limit on the admissible probe set)."""


class SemanticError(SvdistError):
    """A scenario file parsed but its content is invalid."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(message if field is None else f"{field}: {message}")


class InternalInvariantError(SvdistError):
    """A runtime self-check failed; indicates a bug, never user error."""
