"""
Exception hierarchy for the ghost scaling suite.

Everything raised on purpose derives from GhostError so the CLI can map it to
exit code 3; argument and format problems also derive from ValueError.
"""


class GhostError(Exception):
    """Base class for computation errors."""


class InvalidFieldSpec(GhostError, ValueError):
    """Bad field grammar or variant parameter (alpha <= 0, m < 2, ...)."""


class DomainViolation(GhostError, ValueError):
    """Argument outside the domain of an operation (non-finite r, theta off the circle)."""


class MalformedData(GhostError, ValueError):
    """A CSV file that does not follow the sample schema."""


class NonpositiveParameter(GhostError, ValueError):
    """Closed forms are only defined for r > 0."""


class NoTransit(GhostError):
    """The rate vanishes or changes sign on the interval; a fixed point blocks passage."""


class ToleranceNotMet(GhostError):
    """Quadrature ran out of subdivisions before reaching the requested accuracy."""


class StepLimitExceeded(GhostError):
    """The ODE engine needed more steps than its budget allows."""


class DivergentLimit(GhostError, ArithmeticError):
    """The r -> 0+ passage time diverges (alpha >= 1)."""


class SingularPoint(GhostError, ArithmeticError):
    """Elongation L(theta) evaluated at 0 or +-pi under the Exclude policy."""


class InsufficientData(GhostError):
    """Fewer samples than a scaling fit needs."""


class DegenerateData(GhostError):
    """Zero variance in the regressor of a scaling fit."""


class UnknownFamily(GhostError):
    """No scaling prediction exists for this combination of phase and parameter map."""


class SweepError(GhostError):
    """A sweep point failed; carries the offending r."""

    def __init__(self, r, cause):
        super().__init__(f"sweep failed at r={r:.17g}: {type(cause).__name__}: {cause}")
        self.r = r
        self.cause = cause
