"""Exception types shared across the package."""


class QcommError(Exception):
    """Base class for all package errors."""


class CapacityError(QcommError):
    """A register layout or enumeration exceeds the simulable budget."""


class ContractViolationError(QcommError):
    """A caller-supplied operator or protocol step breaks its contract
    (non-unitary matrix, write outside the declared message window, ...)."""


class NumericalFailureError(QcommError):
    """A numerical routine (SVD) failed to converge."""


class PatternMismatchError(QcommError):
    """A candidate non-deterministic matrix does not match the target
    zero-pattern.  Carries the offending (x, y) pairs."""

    def __init__(self, message, counterexamples):
        super().__init__(message)
        self.counterexamples = list(counterexamples)


class FamilyHypothesisError(QcommError):
    """A vector family fed to the scalarization routine violates the
    'sum vanishes exactly on the zero set' hypothesis."""


class ProbabilisticFailureError(QcommError):
    """A randomized routine exhausted its retry budget."""
