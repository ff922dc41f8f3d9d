"""Exception types shared across the package."""


class DomainError(ValueError):
    """A parameter is outside the mathematical domain of the requested operation."""


class PaymentPositivityError(DomainError):
    """A payment schedule violates strict positivity (disable with strict=False)."""


class EnumerationBudgetError(DomainError):
    """An exact enumeration was requested beyond the supported horizon."""


class ShapeMismatchError(DomainError):
    """Analytic and oracle series cover different horizons."""


class NumericalFailureError(ArithmeticError):
    """A result is numerically invalid beyond tolerance (e.g. negative variance)."""


class FormulaAuditError(NumericalFailureError):
    """A specialized closed form disagrees with the general path beyond tolerance."""
