"""Exception types raised by kgvar."""


class KGVarError(Exception):
    """Base class for library errors."""


class ArgumentError(KGVarError, ValueError):
    """Invalid argument: wrong axis, mismatched grids, bad shapes."""


class DegenerateMetricError(KGVarError, ArithmeticError):
    """Gram matrix of the tangent frame is singular (or has the wrong signature).

    ``point`` holds the multi-index of the first offending grid point.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class ChainRuleError(DegenerateMetricError):
    """Jacobian needed for a chain-rule solve is singular at some point."""


class SuperluminalError(KGVarError, ValueError):
    """A speed reached or exceeded c."""


class ConvergenceError(KGVarError, RuntimeError):
    """Iterative solver failed to converge; ``residuals`` carries the last estimates."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals
