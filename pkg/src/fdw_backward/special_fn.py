"""Gamma and two-parameter Mittag-Leffler functions on the negative real axis.

``E_{a,b}(-eta)`` is evaluated in one of three regimes:

* ``series``: the defining power series, summed with ``math.fsum``;
* ``contour``: leading algebraic terms plus a remainder integral along the
  path of :mod:`fdw_backward.quadrature`;
* ``asymptotic``: the algebraic expansion in ``1/eta``, optimally truncated,
  plus the two conjugate exponentially small residue terms.

Each regime reports an error estimate and :func:`ml` returns the first one that
certifies ``TARGET_RTOL``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import AccuracyLossError, ConvergenceError, PoleError
from .quadrature import ContourConfig, build_path, default_config

__all__ = [
    "Regime",
    "MLQuery",
    "MLValue",
    "gamma",
    "rgamma",
    "ml",
    "mittag_leffler",
    "ml_series",
    "ml_contour",
    "ml_asymptotic",
    "ml_many",
    "contour_remainder",
    "optimal_truncation_index",
]

SERIES_MAX_ETA = 8.0
ASYMPTOTIC_MIN_ETA = 50.0
CONTOUR_MIN_ETA = 1.5
TARGET_RTOL = 1e-10
SERIES_STOP_RTOL = 1e-18
SERIES_MAX_TERMS = 400
ASYMPTOTIC_MAX_TERMS = 400
_EPS = np.finfo(float).eps
# contour estimate is |Q_32 - Q_24|, which overstates the 32-node error
_COARSE_NODES = 24


class Regime(str, Enum):
    SERIES = "series"
    CONTOUR = "contour"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class MLQuery:
    alpha: float
    beta: float
    eta: float

    def __post_init__(self):
        if not (1.0 < self.alpha <= 2.0):
            raise ValueError(f"alpha must lie in (1, 2], got {self.alpha!r}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta!r}")
        if not (self.eta >= 0 and math.isfinite(self.eta)):
            raise ValueError(f"eta must be finite and >= 0, got {self.eta!r}")


@dataclass(frozen=True)
class MLValue:
    value: float
    abs_error_estimate: float
    regime: Regime

    def __float__(self) -> float:
        return self.value


def _is_pole(x: float) -> bool:
    return x <= 0 and abs(x - round(x)) <= 1e-12 * max(1.0, abs(x))


def gamma(x: float) -> float:
    """Gamma function for real ``x`` away from the poles ``0, -1, -2, ...``."""
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"Gamma has a pole at {x!r}")
    return math.gamma(x)


def rgamma(x: float) -> float:
    """``1/Gamma(x)``, zero at the poles and without overflow for large ``|x|``."""
    if _is_pole(x):
        return 0.0
    if -170.0 < x < 171.0:
        return 1.0 / math.gamma(x)
    sign = 1.0
    if x < 0 and math.floor(x) % 2 == 1:
        sign = -1.0
    log_mag = -math.lgamma(x)
    if log_mag > 709.0:
        return sign * math.inf
    return sign * math.exp(log_mag)


# -- series -----------------------------------------------------------------


def ml_series(alpha: float, beta: float, eta: float) -> MLValue:
    """Power series with compensated summation and a rounding/tail error bound."""
    terms = []
    abs_sum = 0.0
    prev = math.inf
    k = 0
    log_eta = math.log(eta) if eta > 0 else -math.inf
    while k < SERIES_MAX_TERMS:
        arg = alpha * k + beta
        if eta == 0:
            t = rgamma(beta) if k == 0 else 0.0
        elif arg < 171.0:
            t = eta**k / math.gamma(arg)
        else:
            t = math.exp(k * log_eta - math.lgamma(arg))
        t = -t if k % 2 else t
        terms.append(t)
        abs_sum += abs(t)
        partial = math.fsum(terms)
        if k > 0 and abs(t) <= prev and abs(t) < SERIES_STOP_RTOL * max(abs(partial), 1e-300):
            break
        if eta == 0:
            break
        prev = abs(t)
        k += 1
    value = math.fsum(terms)
    # each term carries a few ulps from pow/gamma; the tail beyond the last
    # (decreasing, alternating) term is bounded by that term
    err = 8 * _EPS * abs_sum + (abs(terms[-1]) if eta > 0 else 0.0)
    return MLValue(value, err, Regime.SERIES)


# -- contour ----------------------------------------------------------------


def _contour_order(alpha: float, beta: float) -> int:
    return 2 if _is_pole(beta - alpha) else 1


def _algebraic_terms(alpha: float, beta: float, eta: np.ndarray, order: int) -> np.ndarray:
    # -sum_{k=1}^{order} z^{-k} / Gamma(beta - alpha k), z = -eta
    out = np.zeros_like(eta)
    for k in range(1, order + 1):
        out -= (-1.0) ** k * eta ** (-k) * rgamma(beta - alpha * k)
    return out


def _remainder_sums(alpha, beta, eta, order, cfg, chunk=256):
    # remainder integral and the sum of |terms| that bounds its rounding
    path = build_path(alpha, cfg)
    zeta = path.zeta
    g = np.exp(zeta ** (1.0 / alpha)) * zeta ** ((1.0 - beta) / alpha + order) * path.dzeta
    gr, gi, gabs = g.real.copy(), g.imag.copy(), np.abs(g)
    x, y = zeta.real.copy(), zeta.imag.copy()
    y2 = y * y
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    out = np.empty_like(eta)
    mag = np.empty_like(eta)
    for s in range(0, eta.size, chunk):
        e = eta[s : s + chunk]
        # Im(g / (zeta + e)) in real arithmetic
        d = x[None, :] + e[:, None]
        den = d * d + y2[None, :]
        acc = ((gi[None, :] * d - gr[None, :] * y[None, :]) / den).sum(axis=1)
        norm = alpha * math.pi * e**order
        # conjugate symmetry: full path integral = 2i Im(upper half)
        out[s : s + chunk] = acc / (alpha * math.pi * (-e) ** order)
        mag[s : s + chunk] = (gabs[None, :] / np.sqrt(den)).sum(axis=1) / norm
    return out, mag


def contour_remainder(
    alpha: float,
    beta: float,
    eta,
    order: int,
    cfg: ContourConfig | None = None,
    chunk: int = 256,
) -> np.ndarray:
    """Remainder integral of the contour representation.

    With ``z = -eta`` and ``p = order``,
    ``E_{a,b}(z) = -sum_{k<=p} z^{-k}/Gamma(b - a k) + R_p(eta)`` where
    ``R_p = 1/(2 pi i a z^p) * int exp(zeta^{1/a}) zeta^{(1-b)/a + p} / (zeta - z) dzeta``.
    Valid for ``eta > 1``.
    """
    if cfg is None:
        cfg = default_config(alpha)
    return _remainder_sums(alpha, beta, eta, order, cfg, chunk)[0]


def _contour_values(alpha, beta, eta, cfg=None, with_error=True):
    if cfg is None:
        cfg = default_config(alpha)
    order = _contour_order(alpha, beta)
    eta = np.asarray(eta, dtype=float)
    lead = _algebraic_terms(alpha, beta, eta, order)
    rem, mag = _remainder_sums(alpha, beta, eta, order, cfg)
    fine = lead + rem
    if not with_error:
        return fine, None
    coarse_cfg = ContourConfig(cfg.theta, cfg.ray_truncation, cfg.panels, _COARSE_NODES)
    coarse = lead + contour_remainder(alpha, beta, eta, order, coarse_cfg)
    scale = np.abs(lead) + np.abs(fine)
    err = np.abs(fine - coarse) + 64 * _EPS * scale + 4 * _EPS * mag
    return fine, err


def ml_contour(alpha: float, beta: float, eta: float, cfg: ContourConfig | None = None) -> MLValue:
    """Contour-integral evaluation, ``eta > 1`` and ``alpha < 2``."""
    if not eta > 1.0:
        raise ValueError("contour representation requires eta > 1")
    v, err = _contour_values(alpha, beta, np.array([eta]), cfg)
    return MLValue(float(v[0]), float(err[0]), Regime.CONTOUR)


# -- asymptotic -------------------------------------------------------------


def _residue_part(alpha: float, beta: float, eta):
    """``(2/a) Re[Z^{1-b} exp(Z)]``, ``Z = eta^{1/a} e^{i pi/a}``; returns (value, amplitude)."""
    eta = np.asarray(eta, dtype=float)
    mod = eta ** (1.0 / alpha)
    ang = math.pi / alpha
    re = mod * math.cos(ang)
    amp = (2.0 / alpha) * mod ** (1.0 - beta) * np.exp(re)
    phase = (1.0 - beta) * ang + mod * math.sin(ang)
    return amp * np.cos(phase), amp


def _asymptotic_term_ulps(alpha: float, beta: float, eta: float, k: int) -> tuple[float, float]:
    """Term ``-z^{-k}/Gamma(b - a k)`` (``z = -eta``) and its rounding in ulps."""
    x = beta - alpha * k
    if _is_pole(x):
        return 0.0, 0.0
    # rounding of x is amplified by the digamma function near the poles
    dist = abs(x - round(x)) if x < 0.5 else 1.0
    ulps = 4.0 + alpha * k / max(dist, 1e-300)
    sign = -((-1.0) ** k)
    if -170.0 < x < 171.0 and k * abs(math.log10(eta)) < 300:
        return sign * eta ** (-k) / math.gamma(x), ulps
    log_mag = -k * math.log(eta) - math.lgamma(x)
    if log_mag < -745:
        return 0.0, 0.0
    if log_mag > 709:
        return sign * math.inf, ulps
    sign_g = 1.0 if (x > 0 or math.floor(x) % 2 == 0) else -1.0
    return sign * sign_g * math.exp(log_mag), ulps + abs(log_mag)


def _asymptotic_term(alpha: float, beta: float, eta: float, k: int) -> float:
    return _asymptotic_term_ulps(alpha, beta, eta, k)[0]


def optimal_truncation_index(alpha: float, beta: float, eta: float) -> int:
    """Index of the smallest non-zero term of the algebraic expansion."""
    best_k, best = 1, math.inf
    for k in range(1, ASYMPTOTIC_MAX_TERMS + 1):
        t = abs(_asymptotic_term(alpha, beta, eta, k))
        if t == 0.0:
            continue
        if t < best:
            best_k, best = k, t
        elif t > 4 * best:
            break
    return best_k


def _next_nonzero(alpha, beta, eta, k):
    for j in range(k + 1, k + 1 + ASYMPTOTIC_MAX_TERMS):
        t = _asymptotic_term(alpha, beta, eta, j)
        if t != 0.0:
            return abs(t)
        if alpha * j - beta > 400:
            break
    return 0.0


def ml_asymptotic(q: MLQuery, terms: int) -> MLValue:
    """Algebraic expansion truncated after ``terms`` terms, plus residue terms.

    The error estimate is the magnitude of the first omitted non-zero term.
    Warns when ``terms`` exceeds the optimal truncation index.
    """
    if terms < 1:
        raise ValueError("terms must be positive")
    if q.eta <= 0:
        raise ValueError("asymptotic expansion needs eta > 0")
    k_opt = optimal_truncation_index(q.alpha, q.beta, q.eta)
    if terms > k_opt:
        warnings.warn(
            f"terms={terms} past optimal truncation index {k_opt}; the expansion diverges",
            RuntimeWarning,
            stacklevel=2,
        )
    algebraic = [_asymptotic_term(q.alpha, q.beta, q.eta, k) for k in range(1, terms + 1)]
    res, _ = _residue_part(q.alpha, q.beta, q.eta)
    value = math.fsum(algebraic) + float(res)
    err = _next_nonzero(q.alpha, q.beta, q.eta, terms)
    return MLValue(value, err, Regime.ASYMPTOTIC)


def _ml_asymptotic_auto(alpha: float, beta: float, eta: float) -> MLValue:
    res, amp = _residue_part(alpha, beta, eta)
    terms = []
    best = math.inf
    err = 0.0
    rounding = 0.0
    for k in range(1, ASYMPTOTIC_MAX_TERMS + 1):
        t, ulps = _asymptotic_term_ulps(alpha, beta, eta, k)
        if t == 0.0:
            if alpha * k - beta > 400:
                break
            continue
        a = abs(t)
        if a > best:
            # past the smallest term: stop before the expansion turns
            err = best
            break
        scale = abs(math.fsum(terms)) + float(amp)
        if terms and a < 0.25 * _EPS * scale:
            err = a
            break
        terms.append(t)
        rounding += ulps * a
        best = a
    else:
        err = best
    value = math.fsum(terms) + float(res)
    # optimally truncated remainders exceed the smallest term by ~sqrt(k);
    # the residue phase carries |Z| ulps of rounding
    z_mod = eta ** (1.0 / alpha)
    err = 4 * math.sqrt(len(terms) + 1) * err + _EPS * (
        rounding + 4 * abs(value) + (16 + 4 * z_mod) * float(amp)
    )
    return MLValue(value, err, Regime.ASYMPTOTIC)


# -- dispatch ---------------------------------------------------------------


def _scale(alpha: float, beta: float, eta: float, value: float) -> float:
    """Magnitude against which accuracy is certified.

    Near a zero of an oscillating E the relative error is not meaningful, so
    the size of the residue envelope and leading algebraic term count too.
    """
    if eta <= 1.0:
        # no oscillation yet: E is close to 1/Gamma(beta)
        return abs(value)
    _, amp = _residue_part(alpha, beta, eta)
    order = _contour_order(alpha, beta)
    lead = abs(_asymptotic_term(alpha, beta, eta, order))
    return max(abs(value), float(amp) + lead)


def _candidates(alpha: float, eta: float):
    contour_ok = alpha < 2.0
    if eta <= SERIES_MAX_ETA:
        yield Regime.SERIES
        if contour_ok and eta > CONTOUR_MIN_ETA:
            yield Regime.CONTOUR
    elif eta < ASYMPTOTIC_MIN_ETA:
        if contour_ok:
            yield Regime.CONTOUR
        yield Regime.ASYMPTOTIC
        yield Regime.SERIES
    else:
        yield Regime.ASYMPTOTIC
        if contour_ok:
            yield Regime.CONTOUR
        if eta < 1000:
            yield Regime.SERIES


def _evaluate(regime: Regime, alpha: float, beta: float, eta: float) -> MLValue:
    if regime is Regime.SERIES:
        return ml_series(alpha, beta, eta)
    if regime is Regime.CONTOUR:
        return ml_contour(alpha, beta, eta)
    return _ml_asymptotic_auto(alpha, beta, eta)


def ml(q: MLQuery, rtol: float = TARGET_RTOL) -> MLValue:
    """``E_{alpha,beta}(-eta)`` with an error estimate certifying ``rtol``.

    Raises :class:`AccuracyLossError` when no regime certifies the tolerance.
    """
    best = None
    for regime in _candidates(q.alpha, q.eta):
        try:
            v = _evaluate(regime, q.alpha, q.beta, q.eta)
        except ConvergenceError:
            continue
        if not math.isfinite(v.value):
            continue
        if v.abs_error_estimate <= rtol * _scale(q.alpha, q.beta, q.eta, v.value):
            return v
        if best is None or v.abs_error_estimate < best.abs_error_estimate:
            best = v
    raise AccuracyLossError(
        f"E_{{{q.alpha},{q.beta}}}(-{q.eta}): no regime reached rtol={rtol:g}"
        + (f" (best {best.regime.value}, err {best.abs_error_estimate:.3e})" if best else ""),
        best=best,
    )


def mittag_leffler(alpha: float, beta: float, eta: float) -> float:
    """Convenience wrapper returning ``E_{alpha,beta}(-eta)`` as a float."""
    return ml(MLQuery(alpha, beta, eta)).value


def ml_many(alpha: float, beta: float, etas, rtol: float = TARGET_RTOL) -> np.ndarray:
    """Vectorised :func:`ml` for many arguments sharing ``(alpha, beta)``.

    Every argument walks the same candidate regimes as :func:`ml`, one round
    per candidate; contour evaluations within a round are batched.  Results
    are identical to calling :func:`ml` pointwise.
    """
    etas = np.asarray(etas, dtype=float)
    flat = etas.ravel()
    for eta in flat:
        if eta < 0 or not math.isfinite(eta):
            raise ValueError(f"eta must be finite and >= 0, got {eta!r}")
    out = np.full(flat.shape, np.nan)
    plans = [tuple(_candidates(alpha, float(e))) for e in flat]
    pending = list(range(flat.size))
    rnd = 0
    while pending and rnd < max(len(p) for p in plans):
        failed = []
        batch = []
        for i in pending:
            if rnd >= len(plans[i]):
                failed.append(i)
                continue
            regime = plans[i][rnd]
            if regime is Regime.CONTOUR:
                batch.append(i)
                continue
            eta = float(flat[i])
            v = _evaluate(regime, alpha, beta, eta)
            if math.isfinite(v.value) and v.abs_error_estimate <= rtol * _scale(alpha, beta, eta, v.value):
                out[i] = v.value
            else:
                failed.append(i)
        if batch:
            try:
                vals, errs = _contour_values(alpha, beta, flat[batch])
            except ConvergenceError:
                failed.extend(batch)
            else:
                for j, i in enumerate(batch):
                    eta = float(flat[i])
                    if math.isfinite(vals[j]) and errs[j] <= rtol * _scale(alpha, beta, eta, vals[j]):
                        out[i] = vals[j]
                    else:
                        failed.append(i)
        pending = sorted(failed)
        rnd += 1
    for i in pending:
        # raises AccuracyLossError with the pointwise diagnostics
        out[i] = ml(MLQuery(alpha, beta, float(flat[i])), rtol).value
    return out.reshape(etas.shape)
