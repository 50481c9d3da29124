"""Exception hierarchy shared by all psdperm modules."""


class PermboundError(Exception):
    """Base class for every error raised by psdperm."""


class ValidationError(PermboundError):
    pass


class NotHermitian(ValidationError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NotPSD(ValidationError):
    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class ParseError(PermboundError):
    pass


class DimensionMismatch(PermboundError, ValueError):
    pass


class NonPositiveScale(PermboundError, ValueError):
    pass


class NegativeEntry(PermboundError, ValueError):
    pass


class ZeroDiagonal(PermboundError, ValueError):
    pass


class ZeroDenominator(PermboundError, ValueError):
    pass


class ConvergenceFailure(PermboundError):
    pass


class TooLarge(PermboundError):
    """Requested exact computation exceeds the size gate."""


class NegativeResult(PermboundError):
    """A PSD permanent came out clearly negative; the input is not really PSD."""


class SolverError(PermboundError):
    pass


class StageLimit(SolverError):
    pass


class NewtonFailure(SolverError):
    pass


class Infeasible(SolverError, ValueError):
    pass


class EmptyEigenspace(PermboundError):
    pass


class DegenerateSamples(PermboundError):
    pass


class RankDeficient(PermboundError):
    pass


class SpanFailure(PermboundError):
    pass
