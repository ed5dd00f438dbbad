"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Operands have incompatible or unexpected shapes."""


class DomainError(ValueError):
    """An argument is outside the supported domain (e.g. k0sq <= 0)."""


class SingularMatrixError(ArithmeticError):
    """A symmetric factorization failed because a pivot was not positive."""

    def __init__(self, message, pivot_index=None):
        super().__init__(message)
        self.pivot_index = pivot_index


class NumericalBreakdownError(ArithmeticError):
    """A Schur-complement denominator collapsed to (near) zero."""


class DefinitenessLossError(NumericalBreakdownError):
    """A step scalar that must be positive came out non-positive."""

    def __init__(self, message, node_index=None):
        super().__init__(message)
        self.node_index = node_index


class CsvParseError(ValueError):
    """A CSV file could not be parsed; carries 1-based line/column."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column
