"""Exception hierarchy shared by every module."""


class DualRiskError(Exception):
    """Base class for all package errors."""


class DomainError(DualRiskError, ValueError):
    """An argument lies outside the domain of the operation."""


class RegimeError(DomainError):
    """The scenario violates the loading > lambda* regime of the insurer problem."""


class SignError(DomainError):
    """The coverage-fraction denominator is not positive."""


class EmptyAdmissibleError(DualRiskError):
    """No reduction level has cost below the willingness to pay."""


class DegenerateRegionError(DualRiskError):
    """The feasible region of the insurer problem has zero measure."""


class NoBracketError(DualRiskError):
    """A root-finding interval does not contain a sign change."""


class MaxIterError(DualRiskError):
    """An iterative solver did not converge within its budget."""


class ScenarioError(DualRiskError, ValueError):
    """A scenario file could not be parsed."""
