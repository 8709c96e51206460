"""Composite Gauss-Legendre quadrature on the keyhole-free Hankel-type path.

The path consists of the two rays ``arg z = +-theta, |z| >= 1`` joined by the
unit-circle arc ``|arg z| <= theta``.  Every integrand used in this package
is real on the real axis, so only the upper half of the path is discretised;
callers recover the full integral from conjugate symmetry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError

__all__ = ["ContourConfig", "ContourPath", "default_config", "build_path", "gauss_legendre"]

TAIL_RTOL = 1e-16
RAY_START_CHECK = 10.0
MAX_PANEL_PHASE = 2.0


@dataclass(frozen=True)
class ContourConfig:
    """Discretisation of the path.

    ``panels`` counts uniform-angle panels over the whole arc; ``nodes`` is the
    Gauss-Legendre order per panel.  ``ray_truncation`` caps the ray length.
    """

    theta: float
    ray_truncation: float = 1e6
    panels: int = 64
    nodes: int = 32

    def validate(self, alpha: float) -> None:
        lo = math.pi * alpha / 2
        if not (lo < self.theta < math.pi):
            raise ValueError(
                f"theta={self.theta!r} outside admissible interval ({lo!r}, pi) for alpha={alpha!r}"
            )
        if self.panels < 2 or self.nodes < 2:
            raise ValueError("panels and nodes must be >= 2")
        if self.ray_truncation <= RAY_START_CHECK:
            raise ValueError("ray_truncation must exceed 10")


def default_config(alpha: float, **overrides) -> ContourConfig:
    """Midpoint of the admissible angle interval ``(pi*alpha/2, pi)``."""
    theta = overrides.pop("theta", None)
    if theta is None:
        theta = 0.5 * (math.pi * alpha / 2 + math.pi)
    return ContourConfig(theta=theta, **overrides)


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _panel_nodes(edges: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = gauss_legendre(n)
    a = edges[:-1, None]
    b = edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b) + half * x[None, :]).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


def ray_ratio(theta: float) -> float:
    """Geometric panel ratio on the rays.

    The pole ``-eta`` of the integrands sits at distance ``eta*sin(theta)``
    from the ray, near radius ``eta*|cos(theta)|``; panels are kept short
    relative to that distance for every eta.
    """
    return 1.0 + min(1.0, 3.0 * abs(math.tan(theta)))


@dataclass(frozen=True)
class ContourPath:
    alpha: float
    theta: float
    r_max: float
    # upper ray, r in [1, r_max]
    ray_r: np.ndarray = field(repr=False)
    ray_w: np.ndarray = field(repr=False)
    # upper arc, phi in [0, theta]
    arc_phi: np.ndarray = field(repr=False)
    arc_w: np.ndarray = field(repr=False)

    @property
    def zeta(self) -> np.ndarray:
        return np.concatenate(
            [self.ray_r * np.exp(1j * self.theta), np.exp(1j * self.arc_phi)]
        )

    @property
    def dzeta(self) -> np.ndarray:
        """Complex weights: ``dzeta`` oriented from the arc midpoint outwards."""
        return np.concatenate(
            [self.ray_w * np.exp(1j * self.theta), 1j * np.exp(1j * self.arc_phi) * self.arc_w]
        )

    @property
    def arclength(self) -> np.ndarray:
        return np.concatenate([self.ray_w, self.arc_w])

    def envelope(self) -> np.ndarray:
        """``|exp(zeta**(1/alpha))|`` at the nodes."""
        z = self.zeta
        return np.exp((z ** (1.0 / self.alpha)).real)


def _ray_edges(alpha: float, theta: float, cap: float, nodes: int) -> np.ndarray:
    decay = math.cos(theta / alpha)  # < 0 on admissible theta
    freq = math.sin(theta / alpha) / alpha
    q = ray_ratio(theta)
    weight_power = 1.0 + 1.0 / alpha  # largest power integrated against the envelope
    x, w = gauss_legendre(nodes)
    edges = [1.0]
    acc = 0.0
    while True:
        a = edges[-1]
        # the phase r**(1/alpha)*sin(theta/alpha) may advance at most MAX_PANEL_PHASE per panel
        b = min(a * q, a + MAX_PANEL_PHASE / (freq * a ** (1.0 / alpha - 1.0)))
        r = 0.5 * (a + b) + 0.5 * (b - a) * x
        contrib = 0.5 * (b - a) * float(
            np.dot(w, np.exp(decay * r ** (1.0 / alpha)) * r**weight_power)
        )
        acc += contrib
        edges.append(b)
        if b >= RAY_START_CHECK and contrib < TAIL_RTOL * acc:
            return np.asarray(edges)
        if b > cap:
            raise ConvergenceError(
                f"ray tail still {contrib / acc:.3e} of integral at r={b:.3e} "
                f"(cap {cap:.3e}) for alpha={alpha}, theta={theta}"
            )


@lru_cache(maxsize=64)
def build_path(alpha: float, cfg: ContourConfig) -> ContourPath:
    """Quadrature nodes for the upper half of the path (cached, immutable)."""
    cfg.validate(alpha)
    edges = _ray_edges(alpha, cfg.theta, cfg.ray_truncation, cfg.nodes)
    ray_r, ray_w = _panel_nodes(edges, cfg.nodes)
    half_panels = max(1, cfg.panels // 2)
    arc_edges = np.linspace(0.0, cfg.theta, half_panels + 1)
    arc_phi, arc_w = _panel_nodes(arc_edges, cfg.nodes)
    for arr in (ray_r, ray_w, arc_phi, arc_w):
        arr.setflags(write=False)
    return ContourPath(alpha, cfg.theta, float(edges[-1]), ray_r, ray_w, arc_phi, arc_w)
