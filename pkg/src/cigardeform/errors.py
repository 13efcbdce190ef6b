"""Exception types shared across the package."""


class DomainError(ValueError):
    """A quantity was requested outside the domain where it is defined."""


class SingularMetricError(ArithmeticError):
    """The metric component matrix is not invertible at the requested point."""


class MissingPotentialError(ValueError):
    """A soliton quantity was requested from a metric without a potential."""


class NonConvergenceError(RuntimeError):
    """The iterative solver exhausted its budget before reaching tolerance."""

    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(f"{message} (iterations={iterations}, relative residual={residual:.3e})")
        self.iterations = iterations
        self.residual = residual
