"""Exception hierarchy for nspkit."""


class NspkitError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(NspkitError, ValueError):
    pass


class NonFiniteInput(NspkitError, ValueError):
    pass


class AsymmetricInput(NspkitError, ValueError):
    pass


class IndefiniteInput(NspkitError, ValueError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""

    def __init__(self, message, min_eig=None):
        super().__init__(message)
        self.min_eig = min_eig


class InfeasibleProblem(NspkitError):
    """The feasibility conditions of the projection inequality fail."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NumericalBreakdown(NspkitError, ArithmeticError):
    """A step that holds in exact arithmetic failed beyond tolerance."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotMarginallyStable(NspkitError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class SingularX(NspkitError, ArithmeticError):
    pass


class HypothesisViolated(NspkitError, ValueError):
    """Input data does not satisfy the standing assumptions of a lemma."""


class SlaterViolated(HypothesisViolated):
    pass


class ConditionsViolated(NspkitError):
    """Dilation norm conditions fail; no completion exists."""
