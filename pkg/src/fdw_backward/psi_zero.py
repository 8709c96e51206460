"""The mode determinant psi and its positive zeros.

    psi(eta) = E_{a,1}(-eta)^2 + eta E_{a,2}(-eta) E_{a,a}(-eta)

psi(0) = 1 and psi(eta) ~ C/eta^2 with C < 0 as eta grows, so the set of
positive zeros is non-empty; it is also finite.  :func:`find_zeros` locates every
sign change on a mixed linear/log grid below the computable bound of
:mod:`fdw_backward.contour_bound` and refines each by bisection.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .contour_bound import eta_upper_bound
from .errors import NoZeroFoundError
from .special_fn import gamma, ml_many

__all__ = [
    "Zero",
    "ZeroSet",
    "psi",
    "psi_many",
    "psi_leading_constant",
    "find_zeros",
    "default_zeros",
    "scan_grid",
    "NearTangencyWarning",
]

logger = logging.getLogger(__name__)

LINEAR_POINTS = 4096
LINEAR_SPAN = 50.0
BRACKET_RTOL = 1e-12
TANGENCY_LEVEL = 1e-9


class NearTangencyWarning(RuntimeWarning):
    """psi came close to zero inside a grid cell without changing sign."""


@dataclass(frozen=True)
class Zero:
    eta: float
    lo: float
    hi: float
    residual: float

    @property
    def bracket(self) -> tuple[float, float]:
        return (self.lo, self.hi)


@dataclass(frozen=True)
class ZeroSet:
    alpha: float
    zeros: tuple[Zero, ...]
    search_ceiling: float
    grid_points: int = LINEAR_POINTS
    bracket_tol: float = BRACKET_RTOL
    near_tangencies: tuple[tuple[float, float], ...] = field(default=())

    def __len__(self) -> int:
        return len(self.zeros)

    @property
    def etas(self) -> np.ndarray:
        return np.array([z.eta for z in self.zeros])

    @property
    def largest(self) -> float:
        return self.zeros[-1].eta

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "search_ceiling": self.search_ceiling,
            "grid_points": self.grid_points,
            "bracket_tol": self.bracket_tol,
            "count": len(self.zeros),
            "zeros": [
                {"index": k, "eta": float(z.eta), "bracket": [float(z.lo), float(z.hi)], "residual": float(z.residual)}
                for k, z in enumerate(self.zeros, start=1)
            ],
            "near_tangencies": [list(c) for c in self.near_tangencies],
        }


def _check_alpha(alpha: float) -> None:
    if not (1.0 < alpha < 2.0):
        raise ValueError(f"alpha must lie in the open interval (1, 2), got {alpha!r}")


def psi_many(alpha: float, etas) -> np.ndarray:
    etas = np.asarray(etas, dtype=float)
    if np.any(etas < 0):
        raise ValueError("eta must be >= 0")
    e1 = ml_many(alpha, 1.0, etas)
    e2 = ml_many(alpha, 2.0, etas)
    ea = ml_many(alpha, alpha, etas)
    return e1 * e1 + etas * e2 * ea


def psi(alpha: float, eta: float) -> float:
    """``E_{a,1}(-eta)^2 + eta E_{a,2}(-eta) E_{a,a}(-eta)``."""
    _check_alpha(alpha)
    return float(psi_many(alpha, np.array([float(eta)]))[0])


def psi_leading_constant(alpha: float) -> float:
    """Limit of ``eta^2 psi(eta)``: ``-1/(a^2 (a-1) Gamma(-a)^2)``."""
    _check_alpha(alpha)
    return -1.0 / (alpha * alpha * (alpha - 1.0) * gamma(-alpha) ** 2)


def scan_grid(ceiling: float, grid_points: int = LINEAR_POINTS) -> np.ndarray:
    """``grid_points`` linear points on ``[0, min(ceiling, 50)]`` plus half as many log-spaced above."""
    top = min(ceiling, LINEAR_SPAN)
    lin = np.linspace(0.0, top, grid_points)
    if ceiling <= LINEAR_SPAN:
        return lin
    log = np.geomspace(top, ceiling, grid_points // 2 + 1)[1:]
    return np.concatenate([lin, log])


def _bisect(alpha: float, lo: float, hi: float, f_lo: float, rtol: float) -> tuple[float, float]:
    s_lo = math.copysign(1.0, f_lo)
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = psi(alpha, mid)
        if f_mid == 0.0:
            return mid, mid
        if math.copysign(1.0, f_mid) == s_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _natural_scale(alpha: float, eta: float) -> float:
    return abs(psi_leading_constant(alpha)) / max(1.0, eta) ** 2


def _turning_points(values: np.ndarray) -> np.ndarray:
    """Interior grid extrema of one sign that turn back towards zero."""
    v = values
    left, mid, right = v[:-2], v[1:-1], v[2:]
    same = (np.sign(left) == np.sign(mid)) & (np.sign(mid) == np.sign(right))
    peak_below = (mid < 0) & (mid > left) & (mid >= right)
    dip_above = (mid > 0) & (mid < left) & (mid <= right)
    return np.flatnonzero(same & (peak_below | dip_above)) + 1


def _refine_turning_point(alpha, lo, hi, f_mid, xtol):
    """Extremum of psi on ``[lo, hi]`` (maximum if psi < 0 there, else minimum)."""
    flip = -1.0 if f_mid < 0 else 1.0
    res = minimize_scalar(
        lambda x: flip * psi(alpha, x),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": xtol * hi},
    )
    if not np.isfinite(res.fun):
        return None
    return float(res.x), flip * float(res.fun)


def find_zeros(
    alpha: float,
    grid_points: int = LINEAR_POINTS,
    bracket_tol: float = BRACKET_RTOL,
    ceiling: float | None = None,
) -> ZeroSet:
    """All sign-change zeros of psi in ``(0, ceiling)``.

    ``ceiling`` defaults to :func:`~fdw_backward.contour_bound.eta_upper_bound`.
    ``bracket_tol`` is relative: every bracket satisfies ``hi - lo <= bracket_tol * hi``.
    Grid extrema of psi that turn back towards zero are refined with a bounded
    scalar search, which recovers zero pairs falling inside a single grid cell.
    Only odd-order zeros are reported; an extremum whose value stays within
    ``1e-9`` of zero (relative to ``|C|/eta^2``) raises :class:`NearTangencyWarning`.
    """
    _check_alpha(alpha)
    if ceiling is None:
        ceiling = eta_upper_bound(alpha)
    grid = scan_grid(ceiling, grid_points)
    values = psi_many(alpha, grid)
    sign = np.sign(values)
    cells = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    exact = np.flatnonzero(values == 0.0)

    brackets = [(grid[i], grid[i + 1], values[i]) for i in cells]
    tangencies = []
    for i in _turning_points(values):
        found = _refine_turning_point(alpha, grid[i - 1], grid[i + 1], values[i], bracket_tol)
        if found is None:
            continue
        x_star, f_star = found
        if math.copysign(1.0, f_star) != math.copysign(1.0, values[i]):
            # a zero pair hidden between grid nodes
            brackets.append((grid[i - 1], x_star, values[i - 1]))
            brackets.append((x_star, grid[i + 1], f_star))
        elif abs(f_star) < TANGENCY_LEVEL * _natural_scale(alpha, x_star):
            tangencies.append((float(grid[i - 1]), float(grid[i + 1])))

    zeros = []
    for lo, hi, f_lo in brackets:
        lo, hi = _bisect(alpha, lo, hi, f_lo, bracket_tol)
        mid = 0.5 * (lo + hi)
        zeros.append(Zero(mid, lo, hi, abs(psi(alpha, mid))))
    for i in exact:
        if grid[i] > 0:
            zeros.append(Zero(grid[i], grid[i], grid[i], 0.0))
    zeros.sort(key=lambda z: z.eta)

    if tangencies:
        warnings.warn(
            f"psi nearly touches zero without a sign change in {len(tangencies)} place(s) "
            f"for alpha={alpha}; a tangential zero there cannot be resolved",
            NearTangencyWarning,
            stacklevel=2,
        )
    if not zeros:
        raise NoZeroFoundError(
            f"no sign change of psi on [0, {ceiling:g}] for alpha={alpha}; "
            "psi(0)=1 and psi<0 at infinity, so this indicates an evaluation error"
        )
    logger.debug("alpha=%s: %d zeros below %g", alpha, len(zeros), ceiling)
    return ZeroSet(alpha, tuple(zeros), float(ceiling), grid_points, bracket_tol, tuple(tangencies))


@lru_cache(maxsize=32)
def default_zeros(alpha: float) -> ZeroSet:
    """Memoised :func:`find_zeros` with default options."""
    return find_zeros(alpha)
