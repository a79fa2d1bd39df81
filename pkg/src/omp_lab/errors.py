"""Exception hierarchy shared by every module."""


class ContractViolation(ValueError):
    """An input broke a documented precondition."""


class UnsupportedExponentError(ContractViolation):
    pass


class ExcludedCaseError(ContractViolation):
    """The requested (p, q) pair is outside what the bound covers."""


class EnumerationBudgetError(ContractViolation):
    """Exact RIP enumeration would examine more supports than allowed."""


class IterationBudgetError(ContractViolation):
    """The iteration count a bound needs exceeds the number of columns."""


class DataFormatError(Exception):
    """Malformed CSV/JSON input. Carries a line or field diagnostic."""
