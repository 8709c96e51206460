"""Exception types shared across the package."""

from __future__ import annotations


class PoleError(ValueError):
    """Gamma evaluated at a non-positive integer."""


class AccuracyLossError(ArithmeticError):
    """No evaluation regime could certify the requested accuracy."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class ConvergenceError(ArithmeticError):
    """A quadrature or iteration failed its convergence criterion."""


class NoZeroFoundError(RuntimeError):
    """A sign scan of psi found no sign change at all.

    psi(0) = 1 and psi < 0 for large arguments, so this always points at an
    evaluation bug rather than a property of the function.
    """


class IllPosedError(ValueError):
    """Backward reconstruction refused because some mode determinant is too small.

    ``modes`` holds 1-based indices of the offending eigenvalues and
    ``diagnostics`` the :class:`~fdw_backward.solver.BackwardDiagnostics` of the
    attempted reconstruction.
    """

    def __init__(self, message: str, modes: list[int], diagnostics=None):
        super().__init__(message)
        self.modes = modes
        self.diagnostics = diagnostics


class DegenerateNullModeError(ArithmeticError):
    """Both components of a null-mode datum vanished."""
