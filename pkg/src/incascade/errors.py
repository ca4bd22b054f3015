"""Exception hierarchy. CLI exit codes are attached to each class."""


class CascadeError(Exception):
    exit_code = 1


class DegenerateDistributionError(CascadeError, ValueError):
    exit_code = 3


class InputParseError(CascadeError, ValueError):
    exit_code = 3


class InfeasibleTargetError(CascadeError, ValueError):
    """Cascade target or optimization premise cannot be met."""

    exit_code = 2

    def __init__(self, message, boundary_case=None):
        super().__init__(message)
        self.boundary_case = boundary_case


class ConvergenceError(CascadeError, RuntimeError):
    """Iteration cap hit; carries the last iterate and its residual."""

    exit_code = 4

    def __init__(self, message, last=None, residual=None, iterations=None):
        super().__init__(message)
        self.last = last
        self.residual = residual
        self.iterations = iterations
