"""Exception hierarchy shared by every z3lgt module.

Each error carries the process exit code the CLI reports for it.
"""
from typing import Iterable, Optional


class Z3Error(Exception):
    """Base class for all z3lgt failures."""

    exit_code = 2


class ConfigError(Z3Error):
    """Invalid run configuration, config file or command-line flag."""

    exit_code = 1

    def __init__(self, message: str, fields: Optional[Iterable[str]] = None):
        self.fields = sorted(set(fields or []))
        if self.fields:
            message = f"{message} (fields: {', '.join(self.fields)})"
        super().__init__(message)


class DimensionError(Z3Error, ValueError):
    """Operator or vector dimensions are incompatible, too large or out of range."""


class NumericalError(Z3Error):
    """A numerical contract was violated."""


class HermiticityError(NumericalError):
    """An operator expected to be Hermitian is not, within tolerance."""

    def __init__(self, message: str, deviation: float):
        self.deviation = deviation
        super().__init__(f"{message} (max deviation {deviation:.3e})")


class ConvergenceError(NumericalError):
    """The eigensolver failed or produced eigenpairs above the residual bound."""

    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e})")
