"""Exception types raised by the package."""

import numpy as np


class DimensionError(ValueError):
    """Array shapes are inconsistent with each other."""


class TrajectoryOverflowError(ArithmeticError):
    """A simulated state left the representable range."""

    def __init__(self, step: int, bound: float):
        self.step = step
        self.bound = bound
        super().__init__(
            f"state magnitude exceeded {bound:g} at step k={step}; "
            "the system is likely unstable over this horizon"
        )


class IllConditionedError(np.linalg.LinAlgError):
    """A regularized kernel system is (numerically) singular."""

    def __init__(self, condition: float, hint: str = ""):
        self.condition = condition
        msg = f"kernel system is ill-conditioned (1-norm condition estimate {condition:.3e})"
        if hint:
            msg += f"; {hint}"
        super().__init__(msg)


class ConvergenceError(ArithmeticError):
    """An iterative method did not converge."""

    def __init__(self, msg: str, iterations: int = 0):
        self.iterations = iterations
        super().__init__(msg)


class UndefinedSigmaError(ValueError):
    """The growth factor of an all-zero trajectory is undefined."""
