"""Exception hierarchy shared by every module."""


class GrindError(Exception):
    """Base class for all package errors."""


class DomainError(GrindError, ValueError):
    """A model input lies outside the mathematical domain (zero or negative)."""


class NormalizationError(GrindError, ZeroDivisionError):
    """A normalizing quantity (ideal value, column norm) is zero."""


class UsageError(GrindError, ValueError):
    """Invalid combination of arguments supplied by the caller."""


class ConfigError(GrindError, ValueError):
    """Process constants violate their invariants.

    ``issues`` holds ``(field, message)`` pairs, one per violation.
    """

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(f"{name}: {msg}" for name, msg in self.issues))


class InfeasibleError(GrindError):
    """No candidate satisfies the bounds and the wheel-wear constraint."""

    def __init__(self, message, least_violating=None, residual=None):
        super().__init__(message)
        self.least_violating = least_violating
        self.residual = residual


class DegenerateMatrixError(GrindError, ValueError):
    """A decision matrix cannot produce a meaningful TOPSIS ranking."""


class MatrixParseError(GrindError, ValueError):
    """Malformed decision-matrix file; carries the offending location."""

    def __init__(self, message, row=None, column=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.row = row
        self.column = column
