"""Backward problem for the time-fractional diffusion-wave equation, 1 < alpha < 2.

Forward spectral evolution, two-datum backward reconstruction, the exceptional
final times built from the zeros of the mode determinant psi, and a computable
bound on those zeros.  The numerical core is a Mittag-Leffler evaluator with
series, contour-integral and asymptotic regimes.
"""

from __future__ import annotations

from .contour_bound import BoundReport, bound_report, eta_upper_bound, safe_time_threshold
from .errors import (
    AccuracyLossError,
    ConvergenceError,
    DegenerateNullModeError,
    IllPosedError,
    NoZeroFoundError,
    PoleError,
)
from .psi_zero import ZeroSet, default_zeros, find_zeros, psi
from .solver import (
    BackwardDiagnostics,
    Lambda,
    ModeMatrix,
    backward,
    exceptional_set,
    forward,
    mode_matrix,
    null_mode,
    ode_backward,
    ode_forward,
)
from .special_fn import MLQuery, MLValue, Regime, ml, mittag_leffler
from .spectral_model import (
    GridFunction,
    SpectralCoeffs,
    Spectrum,
    dirichlet_laplacian_1d,
    evaluate,
    norm_h2,
    norm_l2,
    project,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyLossError",
    "BackwardDiagnostics",
    "BoundReport",
    "ConvergenceError",
    "DegenerateNullModeError",
    "GridFunction",
    "IllPosedError",
    "Lambda",
    "MLQuery",
    "MLValue",
    "ModeMatrix",
    "NoZeroFoundError",
    "PoleError",
    "Regime",
    "SpectralCoeffs",
    "Spectrum",
    "ZeroSet",
    "backward",
    "bound_report",
    "default_zeros",
    "dirichlet_laplacian_1d",
    "eta_upper_bound",
    "evaluate",
    "exceptional_set",
    "find_zeros",
    "forward",
    "mittag_leffler",
    "ml",
    "mode_matrix",
    "norm_h2",
    "norm_l2",
    "null_mode",
    "ode_backward",
    "ode_forward",
    "project",
    "psi",
    "safe_time_threshold",
]
