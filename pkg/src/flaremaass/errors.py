"""Exception hierarchy shared by all modules.

Every error carries the name of the module that raised it so the CLI can
report where a failure happened without printing a traceback.
"""

from __future__ import annotations


class FlareMaassError(Exception):
    """Base class for all library errors."""

    module = "flaremaass"
    exit_code = 1

    def __init__(self, message: str, module: str | None = None, **context):
        super().__init__(message)
        if module is not None:
            self.module = module
        self.context = context

    def __str__(self) -> str:
        base = f"[{self.module}] {super().__str__()}"
        if self.context:
            extra = ", ".join(f"{k}={v}" for k, v in self.context.items())
            base += f" ({extra})"
        return base


class DomainError(FlareMaassError, ValueError):
    """Argument outside the mathematically valid range."""

    exit_code = 2


class BoundaryError(DomainError):
    """Point lies on (or numerically too close to) the model boundary."""


class PoleError(DomainError):
    """Function evaluated at a pole."""


class NotHyperbolicError(DomainError):
    """A Moebius map expected to be hyperbolic is elliptic or parabolic."""


class ConfigurationError(FlareMaassError, ValueError):
    """Inconsistent or unusable run configuration."""

    exit_code = 2


class CoverageError(ConfigurationError):
    """An expansion has no rows in the linear system."""


class ConvergenceError(FlareMaassError, ArithmeticError):
    """A series or iteration failed to converge within its cap."""

    exit_code = 3


class NonTerminationError(ConvergenceError):
    """A pullback loop exceeded its move cap."""


class ConditioningError(FlareMaassError, ArithmeticError):
    """Least-squares system is numerically rank deficient."""

    exit_code = 3


class DegenerateStepError(ConvergenceError):
    """The secant method could not produce a usable step."""


class NonConvergenceError(ConvergenceError):
    """The spectral search hit its iteration cap; carries the trajectory."""

    def __init__(self, message: str, module: str | None = None, trajectory=None, **context):
        super().__init__(message, module, **context)
        self.trajectory = list(trajectory or [])


class RegressionFailure(FlareMaassError):
    """A regression case disagreed with its embedded expectation."""

    exit_code = 4
