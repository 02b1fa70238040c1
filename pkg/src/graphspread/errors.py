"""Exception hierarchy. Each family maps onto one CLI exit code."""


class GraphSpreadError(Exception):
    exit_code = 1


class ContractError(GraphSpreadError, ValueError):
    """An input violates a documented precondition (shape, symmetry, sign)."""

    exit_code = 2


class ParseError(GraphSpreadError, ValueError):
    exit_code = 3


class NumericalError(GraphSpreadError, ArithmeticError):
    """Degenerate input for a numerical routine."""

    exit_code = 4


class DegenerateDegreeError(NumericalError):
    pass


class DisconnectedGraphError(NumericalError):
    pass


class DegenerateSpreadError(NumericalError):
    pass


class NormalizationError(ContractError):
    pass


class DomainError(NumericalError):
    pass


class RefinementError(NumericalError):
    pass
