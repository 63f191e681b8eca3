"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class DegenerateTriangleError(ValueError):
    """Side lengths do not describe a proper (non-degenerate) triangle."""


class InvariantError(ArithmeticError):
    """An internal mathematical invariant failed beyond tolerance."""


class GluingError(ValueError):
    """A triangle complex has inconsistent or mismatched side identifications."""


class FixtureSyntaxError(ValueError):
    """A complex fixture file could not be parsed."""

    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class BudgetExhausted(RuntimeError):
    """A search ran out of its configured budget without a certificate."""
