"""Computable upper bound on the largest positive zero of psi and a safe final time.

Three algebraic constants (``kappa``) and three path integrals (``nu``) of
``|exp(zeta**(1/alpha))|`` against powers of ``|zeta|`` give

    eta_N < max{1/|cos theta|, a^2 (a-1) Gamma(-a)^2 (k2 n3 + k3 n2 + 2 k1 n1 + n1^2 + n2 n3)}

for any angle ``theta`` in ``(pi*alpha/2, pi)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .quadrature import ContourConfig, build_path, default_config
from .special_fn import contour_remainder, gamma

__all__ = [
    "ContourConfig",
    "BoundReport",
    "default_config",
    "kappa_constants",
    "nu_integrals",
    "tail_integrals",
    "eta_upper_bound",
    "safe_time_threshold",
    "bound_report",
]


@dataclass(frozen=True)
class BoundReport:
    alpha: float
    kappa1: float
    kappa2: float
    kappa3: float
    nu1: float
    nu2: float
    nu3: float
    eta_bound: float
    theta_used: float
    r_max: float

    def to_dict(self) -> dict:
        return asdict(self)


def _check_alpha(alpha: float) -> None:
    if not (1.0 < alpha < 2.0):
        raise ValueError(f"alpha must lie in the open interval (1, 2), got {alpha!r}")


def kappa_constants(alpha: float) -> tuple[float, float, float]:
    """``(-1/Gamma(1-a), 1/Gamma(2-a), 1/Gamma(-a))``, all positive for 1 < a < 2."""
    _check_alpha(alpha)
    g = gamma(-alpha)
    return 1.0 / (alpha * g), 1.0 / ((alpha * alpha - alpha) * g), 1.0 / g


def _resolve(alpha: float, cfg: ContourConfig | None) -> ContourConfig:
    _check_alpha(alpha)
    if cfg is None:
        cfg = default_config(alpha)
    cfg.validate(alpha)
    return cfg


@lru_cache(maxsize=128)
def _nu_cached(alpha: float, cfg: ContourConfig) -> tuple[float, float, float]:
    path = build_path(alpha, cfg)
    decay = math.cos(cfg.theta / alpha)
    ray = np.exp(decay * path.ray_r ** (1.0 / alpha))
    arc = float(np.dot(path.arc_w, np.exp(np.cos(path.arc_phi / alpha))))
    # two rays and two half-arcs contribute equally
    pref = 2.0 / (2.0 * math.pi * alpha * math.sin(cfg.theta))
    out = []
    for power in (1.0, 1.0 - 1.0 / alpha, 1.0 + 1.0 / alpha):
        out.append(pref * (float(np.dot(path.ray_w, ray * path.ray_r**power)) + arc))
    return tuple(out)


def nu_integrals(alpha: float, cfg: ContourConfig | None = None) -> tuple[float, float, float]:
    """Arclength integrals of ``|exp(zeta^{1/a})| |zeta|^w`` over the path.

    ``w = 1, 1 - 1/a, 1 + 1/a``, each scaled by ``1/(2 pi a sin theta)``.
    Raises :class:`~fdw_backward.errors.ConvergenceError` if the ray tail has
    not decayed by ``cfg.ray_truncation``.
    """
    return _nu_cached(alpha, _resolve(alpha, cfg))


def tail_integrals(alpha: float, eta, cfg: ContourConfig | None = None):
    """Remainders ``I_{a,1}, I_{a,2}, I_{a,a}`` of the contour representations.

    ``E_{a,1}(-eta) = -k1/eta + I_{a,1}``, ``E_{a,2}(-eta) = k2/eta + I_{a,2}``
    and ``E_{a,a}(-eta) = -k3/eta^2 + I_{a,a}``, for ``eta >= 1``.
    """
    cfg = _resolve(alpha, cfg)
    eta = np.asarray(eta, dtype=float)
    i1 = contour_remainder(alpha, 1.0, eta, 1, cfg)
    i2 = contour_remainder(alpha, 2.0, eta, 1, cfg)
    ia = contour_remainder(alpha, alpha, eta, 2, cfg)
    if eta.ndim == 0:
        return float(i1[0]), float(i2[0]), float(ia[0])
    return i1, i2, ia


def eta_upper_bound(alpha: float, cfg: ContourConfig | None = None) -> float:
    """Upper bound on the largest positive zero of psi."""
    return bound_report(alpha, cfg).eta_bound


@lru_cache(maxsize=128)
def _report_cached(alpha: float, cfg: ContourConfig) -> BoundReport:
    k1, k2, k3 = kappa_constants(alpha)
    n1, n2, n3 = _nu_cached(alpha, cfg)
    lead = alpha * alpha * (alpha - 1.0) * gamma(-alpha) ** 2
    algebraic = lead * (k2 * n3 + k3 * n2 + 2.0 * k1 * n1 + n1 * n1 + n2 * n3)
    bound = max(1.0 / abs(math.cos(cfg.theta)), algebraic)
    r_max = build_path(alpha, cfg).r_max
    return BoundReport(alpha, k1, k2, k3, n1, n2, n3, bound, cfg.theta, r_max)


def bound_report(alpha: float, cfg: ContourConfig | None = None) -> BoundReport:
    return _report_cached(alpha, _resolve(alpha, cfg))


def safe_time_threshold(alpha: float, mu_min: float, cfg: ContourConfig | None = None) -> float:
    """Final time above which the backward problem is guaranteed well-posed.

    ``mu_min`` is the smallest eigenvalue of the operator.
    """
    if not mu_min > 0:
        raise ValueError("mu_min must be positive")
    return (eta_upper_bound(alpha, cfg) / mu_min) ** (1.0 / alpha)
