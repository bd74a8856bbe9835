"""Typed failures raised by the verification kernel."""


class FrobcheckError(Exception):
    pass


class DegeneratePoint(FrobcheckError):
    """Sample point where the Z-quadratic has a double root (discriminant zero)."""


class NotInvertible(FrobcheckError):
    """Quotient-algebra element with zero norm; ``witness`` holds the norm."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class MetricDegenerate(FrobcheckError):
    pass


class PotentialSyntaxError(FrobcheckError, ValueError):
    def __init__(self, msg, line, column=1, expected=None):
        self.line = line
        self.column = column
        self.expected = expected
        where = f"line {line}, column {column}"
        super().__init__(f"{where}: {msg}" + (f" (expected {expected})" if expected else ""))
