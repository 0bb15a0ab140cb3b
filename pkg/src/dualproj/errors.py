"""Exception types raised across the package."""


class DualprojError(Exception):
    """Base class for package errors."""


class DimensionError(DualprojError, ValueError):
    pass


class ValidationError(DualprojError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(f"block {b}: {r}" if b is not None else r
                                   for b, r in self.violations))


class ParseError(DualprojError, ValueError):
    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = "" if line is None else f"line {line}: "
        if field is not None:
            where += f"[{field}] "
        super().__init__(where + message)


class InvalidGamma(DualprojError, ValueError):
    pass


class DegenerateCorral(DualprojError, ArithmeticError):
    pass


class MaxIterationsExceeded(DualprojError, RuntimeError):
    """Iteration budget ran out; ``best`` holds the last iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NoImprovement(DualprojError, RuntimeError):
    pass


class InsufficientHistory(DualprojError, ValueError):
    pass


class DegenerateAnchor(DualprojError, ZeroDivisionError):
    pass


class StageStall(DualprojError, RuntimeError):
    pass


class RepairUnavailable(DualprojError, ValueError):
    pass


class InfeasibleCandidate(DualprojError, ValueError):
    pass


class BaselineInfeasible(DualprojError, RuntimeError):
    pass


class Infeasible(DualprojError, RuntimeError):
    pass


class ScaleExceeded(DualprojError, ValueError):
    pass
