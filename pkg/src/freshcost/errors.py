"""Exception types shared across the toolkit."""

from __future__ import annotations


class FreshcostError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(FreshcostError):
    """An assumption set violates one or more invariants.

    Carries the full violation list so callers can report every problem
    at once instead of failing on the first.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid business assumptions: {lines}")


class DataError(FreshcostError):
    """Input data is structurally fine but semantically wrong (bad label, wrong shape)."""


class ParseError(FreshcostError):
    """A document could not be parsed; carries location information."""

    def __init__(self, message, *, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
