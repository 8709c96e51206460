"""Forward evolution, two-datum backward reconstruction and the exceptional times.

For ``d^a u/dt^a = -A u`` with ``u(0) = a``, ``u_t(0) = b`` each eigenmode
evolves independently.  With ``eta = mu t^a``

    u_n(t)   = a_n E_{a,1}(-eta) + b_n t E_{a,2}(-eta)
    u_n'(t)  = -mu t^{a-1} a_n E_{a,a}(-eta) + b_n E_{a,1}(-eta)

so the final pair ``(p, q) = (u(T), u_t(T))`` is a 2x2 map of ``(a, b)`` per
mode whose determinant is ``psi(mu T^a)``.  Backward reconstruction inverts
that map; it fails exactly at the final times ``T = (eta_k / mu_n)^{1/a}``
built from the zeros of psi.
"""

from __future__ import annotations

import bisect
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateNullModeError, IllPosedError
from .psi_zero import ZeroSet, default_zeros
from .special_fn import ml_many
from .spectral_model import SpectralCoeffs, Spectrum, norm_h2, norm_l2

__all__ = [
    "PSI_FLOOR",
    "NULL_MODE_TOL",
    "ModeMatrix",
    "BackwardDiagnostics",
    "LambdaEntry",
    "Lambda",
    "NullMode",
    "StabilityReport",
    "IllPosedWarning",
    "mode_matrix",
    "forward",
    "backward",
    "exceptional_set",
    "null_mode",
    "null_datum",
    "ode_forward",
    "ode_backward",
    "empirical_stability",
]

logger = logging.getLogger(__name__)

PSI_FLOOR = 1e-8
NULL_MODE_TOL = 1e-9
DEGENERATE_TOL = 1e-12


class IllPosedWarning(RuntimeWarning):
    """Modes below the determinant floor were zeroed instead of reconstructed."""


def _check_alpha(alpha: float) -> None:
    if not (1.0 < alpha < 2.0):
        raise ValueError(f"alpha must lie in the open interval (1, 2), got {alpha!r}")


def _ml_triplet(alpha: float, etas: np.ndarray, threads: int = 1):
    """``E_{a,1}, E_{a,2}, E_{a,a}`` at ``-etas``.

    Values do not depend on how the arguments are batched, so splitting the
    work over threads leaves every output bit unchanged.
    """
    etas = np.asarray(etas, dtype=float)

    def block(e):
        return ml_many(alpha, 1.0, e), ml_many(alpha, 2.0, e), ml_many(alpha, alpha, e)

    if threads <= 1 or etas.size < 2:
        return block(etas)
    parts = np.array_split(etas, min(threads, etas.size))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(block, parts))
    return tuple(np.concatenate([r[i] for r in results]) for i in range(3))


@dataclass(frozen=True)
class ModeMatrix:
    """``[[e1, T e2], [-mu T^{a-1} ea, e1]]`` mapping ``(a, b)`` to ``(u(T), u_t(T))``."""

    alpha: float
    mu: float
    T: float
    e1: float
    e2: float
    ea: float
    det: float

    @property
    def eta(self) -> float:
        return self.mu * self.T**self.alpha

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.e1, self.T * self.e2], [-self.mu * self.T ** (self.alpha - 1.0) * self.ea, self.e1]]
        )

    @property
    def det_scale(self) -> float:
        """Size of the two terms that cancel in the determinant."""
        return self.e1 * self.e1 + self.eta * abs(self.e2 * self.ea)

    @property
    def relative_det(self) -> float:
        scale = self.det_scale
        return abs(self.det) / scale if scale > 0 else 0.0


def mode_matrix(alpha: float, mu: float, T: float) -> ModeMatrix:
    _check_alpha(alpha)
    if not (mu > 0 and T > 0):
        raise ValueError("mu and T must be positive")
    eta = mu * T**alpha
    e1, e2, ea = (float(v[0]) for v in _ml_triplet(alpha, np.array([eta])))
    return ModeMatrix(alpha, mu, T, e1, e2, ea, e1 * e1 + eta * e2 * ea)


@dataclass(frozen=True)
class _Modes:
    """Per-slot mode data for a whole spectrum at one time."""

    mu: np.ndarray
    eta: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    ea: np.ndarray

    @property
    def det(self) -> np.ndarray:
        return self.e1 * self.e1 + self.eta * self.e2 * self.ea

    @property
    def relative_det(self) -> np.ndarray:
        scale = self.e1 * self.e1 + self.eta * np.abs(self.e2 * self.ea)
        return np.abs(self.det) / scale


def _modes(s: Spectrum, alpha: float, t: float, threads: int) -> _Modes:
    mu = s.eigenvalues
    eta = mu * t**alpha
    e1, e2, ea = _ml_triplet(alpha, eta, threads)
    return _Modes(mu, eta, e1, e2, ea)


def _expand(s: Spectrum, per_mode: np.ndarray) -> np.ndarray:
    return np.repeat(per_mode, s.multiplicities)


def forward(
    s: Spectrum,
    a: SpectralCoeffs,
    b: SpectralCoeffs,
    alpha: float,
    t: float,
    threads: int = 1,
) -> tuple[SpectralCoeffs, SpectralCoeffs]:
    """``(u(t), u_t(t))`` from initial data ``(a, b)``."""
    _check_alpha(alpha)
    a.check(s)
    b.check(s)
    if not t >= 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return a, b
    m = _modes(s, alpha, t, threads)
    e1, e2, ea = (_expand(s, v) for v in (m.e1, m.e2, m.ea))
    mu = s.expanded()
    u = a.values * e1 + b.values * (t * e2)
    du = -mu * t ** (alpha - 1.0) * a.values * ea + b.values * e1
    return SpectralCoeffs(u, s.multiplicities), SpectralCoeffs(du, s.multiplicities)


# -- exceptional set ----------------------------------------------------------


@dataclass(frozen=True)
class LambdaEntry:
    T: float
    n: int
    k: int


@dataclass(frozen=True)
class Lambda:
    """Exceptional final times ``(eta_k / mu_n)^{1/a}`` up to ``T_max``, sorted."""

    alpha: float
    entries: tuple[LambdaEntry, ...]
    T_max: float
    upper_bound: float  # (eta_N / mu_1)^{1/a}

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def times(self) -> np.ndarray:
        return np.array([e.T for e in self.entries])

    def nearest(self, T: float) -> LambdaEntry | None:
        if not self.entries:
            return None
        times = [e.T for e in self.entries]
        i = bisect.bisect_left(times, T)
        cands = [self.entries[j] for j in (i - 1, i) if 0 <= j < len(times)]
        return min(cands, key=lambda e: (abs(e.T - T), e.T))

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "T_max": self.T_max,
            "upper_bound": self.upper_bound,
            "entries": [asdict(e) for e in self.entries],
        }


def exceptional_set(s: Spectrum, z: ZeroSet, alpha: float, T_max: float) -> Lambda:
    """Every ``(n, k)`` with ``(eta_k / mu_n)^{1/a} <= T_max`` for the truncated spectrum."""
    _check_alpha(alpha)
    if not T_max > 0:
        raise ValueError("T_max must be positive")
    if z.alpha != alpha:
        raise ValueError(f"zero set is for alpha={z.alpha}, not {alpha}")
    etas = z.etas
    entries = []
    for n, mu in enumerate(s.eigenvalues, start=1):
        times = (etas / mu) ** (1.0 / alpha)
        for k, T in enumerate(times, start=1):
            if T <= T_max:
                entries.append(LambdaEntry(float(T), n, k))
    entries.sort(key=lambda e: (e.T, e.n, e.k))
    upper = float((etas[-1] / s.mu_min) ** (1.0 / alpha))
    return Lambda(alpha, tuple(entries), float(T_max), upper)


# -- backward -----------------------------------------------------------------


@dataclass(frozen=True)
class BackwardDiagnostics:
    """How close a backward reconstruction is to an exceptional time.

    ``condition_estimate`` is a constant ``C >= 1`` with
    ``1/C <= (||a|| + ||b||) / (||p||_H2 + ||q||_H2) <= C`` for all data on the
    accepted modes.  ``min_relative_psi`` is ``|psi|`` divided by the size of
    the two terms cancelling in it, the quantity compared with ``psi_floor``.
    """

    min_abs_psi: float
    argmin_mode: int
    min_relative_psi: float
    argmin_relative_mode: int
    nearest_exceptional_T: float | None
    nearest_exceptional_mode: int | None
    nearest_exceptional_zero: int | None
    condition_estimate: float
    psi_floor: float
    refused_modes: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        out = asdict(self)
        out["refused_modes"] = list(self.refused_modes)
        return out


def _condition_estimate(m: _Modes, T: float, alpha: float, keep: np.ndarray) -> float:
    if not np.any(keep):
        return 1.0
    mu = m.mu[keep]
    mats = np.empty((mu.size, 2, 2))
    mats[:, 0, 0] = m.e1[keep]
    mats[:, 0, 1] = T * m.e2[keep]
    mats[:, 1, 0] = -mu * T ** (alpha - 1.0) * m.ea[keep]
    mats[:, 1, 1] = m.e1[keep]
    mats *= mu[:, None, None]
    sv = np.linalg.svd(mats, compute_uv=False)
    forward_gain = float(sv[:, 0].max())
    inverse_gain = float((1.0 / sv[:, 1]).max())
    return max(1.0, math.sqrt(2.0) * forward_gain, math.sqrt(2.0) * inverse_gain)


def _diagnostics(
    s: Spectrum, m: _Modes, alpha: float, T: float, psi_floor: float, zeros: ZeroSet | None, refused
) -> BackwardDiagnostics:
    det = np.abs(m.det)
    rel = m.relative_det
    i_abs = int(np.argmin(det))
    i_rel = int(np.argmin(rel))
    if zeros is None:
        zeros = default_zeros(alpha)
    # nearest exceptional time over all (n, k) of the truncated spectrum
    times = (zeros.etas[None, :] / m.mu[:, None]) ** (1.0 / alpha)
    flat = int(np.argmin(np.abs(times - T)))
    n_near, k_near = np.unravel_index(flat, times.shape)
    keep = np.ones(m.mu.size, dtype=bool)
    keep[np.asarray(refused, dtype=int) - 1] = False
    return BackwardDiagnostics(
        min_abs_psi=float(det[i_abs]),
        argmin_mode=i_abs + 1,
        min_relative_psi=float(rel[i_rel]),
        argmin_relative_mode=i_rel + 1,
        nearest_exceptional_T=float(times[n_near, k_near]),
        nearest_exceptional_mode=int(n_near) + 1,
        nearest_exceptional_zero=int(k_near) + 1,
        condition_estimate=_condition_estimate(m, T, alpha, keep),
        psi_floor=psi_floor,
        refused_modes=tuple(int(n) for n in refused),
    )


def backward(
    s: Spectrum,
    p: SpectralCoeffs,
    q: SpectralCoeffs,
    alpha: float,
    T: float,
    psi_floor: float = PSI_FLOOR,
    *,
    force: bool = False,
    zeros: ZeroSet | None = None,
    threads: int = 1,
) -> tuple[SpectralCoeffs, SpectralCoeffs, BackwardDiagnostics]:
    """Initial data ``(a, b)`` from final data ``(p, q) = (u(T), u_t(T))``.

    A mode is refused when its determinant has lost more than ``-log10(psi_floor)``
    digits to cancellation, i.e. ``|psi| < psi_floor * (e1^2 + eta |e2 ea|)``.
    Refused modes raise :class:`~fdw_backward.errors.IllPosedError` unless
    ``force`` is set, in which case they are returned as zeros with an
    :class:`IllPosedWarning`.  ``zeros`` (default: the cached zero set) only
    feeds the diagnostics.
    """
    _check_alpha(alpha)
    p.check(s)
    q.check(s)
    if not T > 0:
        raise ValueError("T must be positive")
    if not psi_floor > 0:
        raise ValueError("psi_floor must be positive")
    m = _modes(s, alpha, T, threads)
    bad = m.relative_det < psi_floor
    refused = [int(n) for n in np.flatnonzero(bad) + 1]
    diag = _diagnostics(s, m, alpha, T, psi_floor, zeros, refused)
    if refused and not force:
        raise IllPosedError(
            f"final time T={T!r} is (numerically) exceptional for mode(s) {refused}: "
            f"relative determinant below {psi_floor:g}",
            refused,
            diag,
        )
    if refused:
        warnings.warn(
            f"modes {refused} set to zero: determinant below floor {psi_floor:g}",
            IllPosedWarning,
            stacklevel=2,
        )
    det = np.where(bad, 1.0, m.det)
    mu = s.expanded()
    e1, e2, ea, d = (_expand(s, v) for v in (m.e1, m.e2, m.ea, det))
    a = (p.values * e1 - q.values * (T * e2)) / d
    b = (p.values * (mu * T ** (alpha - 1.0) * ea) + q.values * e1) / d
    mask = _expand(s, bad)
    a[mask] = 0.0
    b[mask] = 0.0
    logger.debug("backward: min |psi|=%g at mode %d", diag.min_abs_psi, diag.argmin_mode)
    return SpectralCoeffs(a, s.multiplicities), SpectralCoeffs(b, s.multiplicities), diag


# -- non-uniqueness -----------------------------------------------------------


@dataclass(frozen=True)
class NullMode:
    """Unit initial pair on one mode whose final pair vanishes."""

    a0: float
    b0: float
    eta: float
    psi: float
    normalizer: float


def null_mode(alpha: float, mu: float, T: float, tol: float = NULL_MODE_TOL) -> NullMode:
    """``(T E_{a,2}(-eta), -E_{a,1}(-eta))`` normalised, ``eta = mu T^a`` a zero of psi.

    Its first final component ``a0 e1 + b0 T e2`` vanishes identically and the
    second equals ``-psi / normalizer``.  ``tol`` bounds the relative
    determinant (see :func:`backward`).
    """
    mm = mode_matrix(alpha, mu, T)
    if mm.relative_det > tol:
        raise ValueError(
            f"mu*T^alpha={mm.eta!r} is not a zero of psi (relative determinant {mm.relative_det:.3e})"
        )
    a0, b0 = T * mm.e2, -mm.e1
    if abs(a0) < DEGENERATE_TOL and abs(b0) < DEGENERATE_TOL:
        raise DegenerateNullModeError(f"null datum vanishes at eta={mm.eta!r}")
    norm = math.hypot(a0, b0)
    return NullMode(float(a0 / norm), float(b0 / norm), float(mm.eta), float(mm.det), float(norm))


def null_datum(
    s: Spectrum, alpha: float, T: float, mode: int
) -> tuple[SpectralCoeffs, SpectralCoeffs, NullMode]:
    """Null pair placed on the first slot of 1-based ``mode``, zero elsewhere."""
    if not 1 <= mode <= s.n_modes:
        raise ValueError(f"mode {mode} outside 1..{s.n_modes}")
    nm = null_mode(alpha, float(s.eigenvalues[mode - 1]), T)
    slot = int(np.cumsum(s.multiplicities)[mode - 1] - s.multiplicities[mode - 1])
    a = np.zeros(s.size)
    b = np.zeros(s.size)
    a[slot], b[slot] = nm.a0, nm.b0
    return SpectralCoeffs(a, s.multiplicities), SpectralCoeffs(b, s.multiplicities), nm


# -- scalar ODE ---------------------------------------------------------------


def ode_forward(lam: float, a: float, b: float, alpha: float, t: float) -> tuple[float, float]:
    """``(v(t), v'(t))`` for ``d^a v/dt^a = -lam v``, ``v(0) = a``, ``v'(0) = b``."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    from .spectral_model import user_spectrum

    s = user_spectrum([lam])
    u, du = forward(s, SpectralCoeffs.for_spectrum(s, [a]), SpectralCoeffs.for_spectrum(s, [b]), alpha, t)
    return float(u.values[0]), float(du.values[0])


def ode_backward(
    lam: float,
    aT: float,
    bT: float,
    alpha: float,
    T: float,
    psi_floor: float = PSI_FLOOR,
    zeros: ZeroSet | None = None,
) -> tuple[float, float, BackwardDiagnostics]:
    """Initial pair from ``v(T) = aT``, ``v'(T) = bT``; refuses ``T = (eta_k/lam)^{1/a}``."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    from .spectral_model import user_spectrum

    s = user_spectrum([lam])
    a, b, diag = backward(
        s,
        SpectralCoeffs.for_spectrum(s, [aT]),
        SpectralCoeffs.for_spectrum(s, [bT]),
        alpha,
        T,
        psi_floor,
        zeros=zeros,
    )
    return float(a.values[0]), float(b.values[0]), diag


# -- empirical stability ------------------------------------------------------


@dataclass(frozen=True)
class StabilityReport:
    """Observed ``(||a|| + ||b||) / (||p||_H2 + ||q||_H2)`` over random data."""

    samples: int
    ratio_min: float
    ratio_max: float
    argmin_sample: int
    argmax_sample: int
    condition_estimate: float
    # modes with the largest forward / inverse gain of mu * M_n
    forward_gain_mode: int
    inverse_gain_mode: int
    roundtrip_max_rel_error: float

    def to_dict(self) -> dict:
        return asdict(self)


def empirical_stability(
    s: Spectrum,
    alpha: float,
    T: float,
    samples: int = 50,
    seed: int = 0,
    threads: int = 1,
    zeros: ZeroSet | None = None,
) -> StabilityReport:
    """Two-sided norm ratio of the final-value map on ``samples`` Gaussian data pairs."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    m = _modes(s, alpha, T, threads)
    mats = np.empty((s.n_modes, 2, 2))
    mats[:, 0, 0] = m.e1
    mats[:, 0, 1] = T * m.e2
    mats[:, 1, 0] = -m.mu * T ** (alpha - 1.0) * m.ea
    mats[:, 1, 1] = m.e1
    sv = np.linalg.svd(mats * m.mu[:, None, None], compute_uv=False)
    ratios = []
    worst = 0.0
    for _ in range(samples):
        a = SpectralCoeffs.for_spectrum(s, rng.standard_normal(s.size))
        b = SpectralCoeffs.for_spectrum(s, rng.standard_normal(s.size))
        p, q = forward(s, a, b, alpha, T, threads)
        ratios.append((norm_l2(a) + norm_l2(b)) / (norm_h2(p, s) + norm_h2(q, s)))
        a2, b2, diag = backward(s, p, q, alpha, T, zeros=zeros, threads=threads)
        err = math.hypot(norm_l2(a2 + (-1) * a), norm_l2(b2 + (-1) * b)) / math.hypot(norm_l2(a), norm_l2(b))
        worst = max(worst, err)
    ratios = np.array(ratios)
    return StabilityReport(
        samples=samples,
        ratio_min=float(ratios.min()),
        ratio_max=float(ratios.max()),
        argmin_sample=int(ratios.argmin()),
        argmax_sample=int(ratios.argmax()),
        condition_estimate=diag.condition_estimate,
        forward_gain_mode=int(np.argmax(sv[:, 0])) + 1,
        inverse_gain_mode=int(np.argmax(1.0 / sv[:, 1])) + 1,
        roundtrip_max_rel_error=worst,
    )
