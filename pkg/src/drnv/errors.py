"""Exception hierarchy for the robust newsvendor solver."""


class DrnvError(Exception):
    """Base class for every error raised by this package."""


class InvalidInstance(DrnvError, ValueError):
    """A problem instance violates one of its invariants."""


class EmptySamples(InvalidInstance):
    pass


class NegativeSample(InvalidInstance):
    pass


class NonpositiveCost(InvalidInstance):
    pass


class NegativeDelta(InvalidInstance):
    pass


class NegativeSigma(InvalidInstance):
    pass


class InvalidWeights(InvalidInstance):
    pass


class OrderingViolation(DrnvError, ValueError):
    """Profit parameters do not satisfy p > c > s > 0."""


class NonpositiveCurvature(DrnvError, ValueError):
    """The quadratic coefficient a = lambda1 + lambda3 is not positive."""


class InfiniteValue(DrnvError):
    """The dual objective is +inf (a <= 0); a typed signal, not a float."""


class NonpositiveXi(DrnvError, ValueError):
    pass


class IterationBudgetExceeded(DrnvError, RuntimeError):
    pass


class DualUnbounded(DrnvError):
    """The dual objective is unbounded below for fixed (xi, Q)."""


class Infeasible(DrnvError):
    """The moment targets cannot be met inside the Wasserstein ball."""


class BracketExpansionFailed(DrnvError, RuntimeError):
    pass


class PrimalInfeasible(DrnvError):
    pass


class UnboundedLp(DrnvError, RuntimeError):
    pass


class ParseError(DrnvError, ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyFile(DrnvError, ValueError):
    pass
