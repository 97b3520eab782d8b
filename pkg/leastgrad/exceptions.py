"""Errors raised by the least gradient toolkit."""


class LeastGradientError(Exception):
    """Base class for every error the toolkit raises on purpose."""


class InvalidChord(LeastGradientError):
    pass


class CrossingChords(LeastGradientError):
    pass


class OnSkeleton(LeastGradientError):
    pass


class OutsideDomain(LeastGradientError):
    pass


class NonConvexDomain(LeastGradientError):
    pass


class DegenerateArrangement(LeastGradientError):
    pass


class PlateauThreshold(LeastGradientError):
    pass


class NestingConflict(LeastGradientError):
    pass


class DomainMismatch(LeastGradientError):
    pass


class AllFree(LeastGradientError):
    pass


class EnumerationLimit(LeastGradientError):
    pass


class GridTooCoarse(LeastGradientError):
    pass


class ShapeMismatch(LeastGradientError):
    pass


class InvalidParameter(LeastGradientError):
    pass


class NonConvergence(LeastGradientError):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class VerificationFailure(LeastGradientError):
    """A well-formed input that fails a feasibility or optimality check."""


class TraceMismatch(VerificationFailure):
    pass


class Infeasible(VerificationFailure):
    pass


class ConstraintViolation(VerificationFailure):
    def __init__(self, message, constraint=None):
        super().__init__(message)
        self.constraint = constraint
