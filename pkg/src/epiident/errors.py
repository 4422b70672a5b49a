"""Exception hierarchy.

The CLI maps these onto exit codes: invalid input -> 2, numerical
failure -> 3, structural unidentifiability -> 4.
"""


class EpiIdentError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(EpiIdentError, ValueError):
    """A precondition on the inputs does not hold."""


class DomainError(InvalidParameterError):
    """An argument lies outside the domain of a closed-form expression."""


class NumericalError(EpiIdentError, ArithmeticError):
    """A numerical procedure failed to deliver a trustworthy result."""


class SingularStateError(NumericalError):
    pass


class IntegrationError(NumericalError):
    pass


class RootBracketError(NumericalError):
    pass


class DegenerateCurveError(NumericalError):
    pass


class NoIntersectionError(NumericalError):
    """The measured observables cannot be produced by any degree."""


class StructuralUnidentifiabilityError(EpiIdentError):
    """The observables determine only a combination of the parameters."""


class UnidentifiablePairError(StructuralUnidentifiabilityError):
    """The 2x2 linear system for (tau, gamma) is singular."""
