"""Operators given by their spectrum, and functions given by eigen-coefficients.

The built-in operator is ``-d^2/dx^2`` on ``(0, L)`` with Dirichlet ends:
eigenvalues ``(n pi / L)^2`` and orthonormal eigenfunctions
``sqrt(2/L) sin(n pi x / L)``.  Any other operator enters through a
user-supplied list of eigenvalues with multiplicities; such spectra carry no
eigenfunctions, so grid projection/synthesis is only available for the
built-in one.

Coefficients are stored flat, mode after mode, ``multiplicities[n]`` entries
per eigenvalue.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.fft import dst

__all__ = [
    "SpectrumKind",
    "Spectrum",
    "SpectralCoeffs",
    "GridFunction",
    "AliasingWarning",
    "dirichlet_laplacian_1d",
    "user_spectrum",
    "interior_grid",
    "project",
    "evaluate",
    "norm_l2",
    "norm_h2",
]


class AliasingWarning(UserWarning):
    """Grid has fewer than two points per retained mode."""


class SpectrumKind(str, enum.Enum):
    DIRICHLET_LAPLACIAN_1D = "dirichlet_laplacian_1d"
    USER_SUPPLIED = "user_supplied"


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    multiplicities: np.ndarray
    kind: SpectrumKind = SpectrumKind.USER_SUPPLIED
    length: float | None = None

    def __post_init__(self):
        mu = _frozen(self.eigenvalues, float)
        ell = _frozen(self.multiplicities, np.int64)
        if mu.ndim != 1 or mu.size == 0:
            raise ValueError("eigenvalues must be a non-empty 1-D sequence")
        if ell.shape != mu.shape:
            raise ValueError("eigenvalues and multiplicities differ in length")
        if not np.all(np.isfinite(mu)) or np.any(mu <= 0):
            raise ValueError("eigenvalues must be finite and positive")
        if np.any(np.diff(mu) <= 0):
            raise ValueError("eigenvalues must be strictly increasing")
        if np.any(ell < 1):
            raise ValueError("multiplicities must be >= 1")
        kind = SpectrumKind(self.kind)
        if kind is SpectrumKind.DIRICHLET_LAPLACIAN_1D and not (self.length and self.length > 0):
            raise ValueError("the Dirichlet Laplacian needs a positive length")
        object.__setattr__(self, "eigenvalues", mu)
        object.__setattr__(self, "multiplicities", ell)
        object.__setattr__(self, "kind", kind)

    @property
    def n_modes(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def size(self) -> int:
        """Total number of coefficients, counting multiplicity."""
        return int(self.multiplicities.sum())

    @property
    def mu_min(self) -> float:
        return float(self.eigenvalues[0])

    def expanded(self) -> np.ndarray:
        """Eigenvalue attached to each flat coefficient slot."""
        return np.repeat(self.eigenvalues, self.multiplicities)

    def mode_of_slot(self) -> np.ndarray:
        """1-based mode index of each flat coefficient slot."""
        return np.repeat(np.arange(1, self.n_modes + 1), self.multiplicities)

    def zeros(self) -> SpectralCoeffs:
        return SpectralCoeffs(np.zeros(self.size), self.multiplicities)

    def to_dict(self) -> dict:
        out = {
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "multiplicities": [int(v) for v in self.multiplicities],
            "kind": self.kind.value,
        }
        if self.length is not None:
            out["length"] = float(self.length)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Spectrum):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.length == other.length
            and np.array_equal(self.eigenvalues, other.eigenvalues)
            and np.array_equal(self.multiplicities, other.multiplicities)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SpectralCoeffs:
    values: np.ndarray
    multiplicities: np.ndarray

    def __post_init__(self):
        vals = _frozen(self.values, float)
        ell = _frozen(self.multiplicities, np.int64)
        if vals.ndim != 1 or vals.size != int(ell.sum()):
            raise ValueError(
                f"{vals.size} coefficients do not match multiplicities summing to {int(ell.sum())}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "multiplicities", ell)

    @classmethod
    def for_spectrum(cls, s: Spectrum, values) -> SpectralCoeffs:
        return cls(np.asarray(values, dtype=float), s.multiplicities)

    @classmethod
    def unit(cls, s: Spectrum, slot: int) -> SpectralCoeffs:
        """Indicator of the 0-based flat ``slot``."""
        v = np.zeros(s.size)
        v[slot] = 1.0
        return cls(v, s.multiplicities)

    def per_mode(self) -> list[np.ndarray]:
        return np.split(self.values, np.cumsum(self.multiplicities)[:-1])

    def check(self, s: Spectrum) -> None:
        if not np.array_equal(self.multiplicities, s.multiplicities):
            raise ValueError("coefficient layout does not match the spectrum")

    def __len__(self) -> int:
        return int(self.values.size)

    def __add__(self, other: SpectralCoeffs) -> SpectralCoeffs:
        if not np.array_equal(self.multiplicities, other.multiplicities):
            raise ValueError("coefficient layouts differ")
        return SpectralCoeffs(self.values + other.values, self.multiplicities)

    def __mul__(self, scalar: float) -> SpectralCoeffs:
        return SpectralCoeffs(self.values * float(scalar), self.multiplicities)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpectralCoeffs):
            return NotImplemented
        return np.array_equal(self.values, other.values) and np.array_equal(
            self.multiplicities, other.multiplicities
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples at the interior nodes ``x_i = i L / (M + 1)``, ``i = 1..M``."""

    x: np.ndarray
    values: np.ndarray
    length: float

    def __post_init__(self):
        x = _frozen(self.x, float)
        v = _frozen(self.values, float)
        if x.shape != v.shape or x.ndim != 1:
            raise ValueError("x and values must be 1-D arrays of equal length")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid values must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)

    @classmethod
    def sample(cls, f, length: float, points: int) -> GridFunction:
        x = interior_grid(length, points)
        return cls(x, np.asarray(f(x), dtype=float), length)

    @property
    def spacing(self) -> float:
        return self.length / (self.x.size + 1)

    def quadrature_norm_sq(self) -> float:
        """Trapezoid ``||f||^2`` with the zero boundary values."""
        return self.spacing * math.fsum(self.values**2)


def interior_grid(length: float, points: int) -> np.ndarray:
    if length <= 0 or points < 1:
        raise ValueError("need length > 0 and at least one point")
    return np.arange(1, points + 1) * (length / (points + 1))


def dirichlet_laplacian_1d(length: float, n_modes: int) -> Spectrum:
    """First ``n_modes`` eigenvalues ``(n pi / L)^2`` of the Dirichlet Laplacian on ``(0, L)``."""
    if not length > 0:
        raise ValueError("length must be positive")
    if n_modes < 1:
        raise ValueError("n_modes must be a positive integer")
    n = np.arange(1, n_modes + 1)
    return Spectrum(
        (n * math.pi / length) ** 2,
        np.ones(n_modes, dtype=np.int64),
        SpectrumKind.DIRICHLET_LAPLACIAN_1D,
        float(length),
    )


def user_spectrum(eigenvalues, multiplicities=None) -> Spectrum:
    mu = np.asarray(eigenvalues, dtype=float)
    ell = np.ones(mu.size, dtype=np.int64) if multiplicities is None else multiplicities
    return Spectrum(mu, ell, SpectrumKind.USER_SUPPLIED)


def _require_dirichlet(s: Spectrum) -> None:
    if s.kind is not SpectrumKind.DIRICHLET_LAPLACIAN_1D:
        raise ValueError("grid projection needs the built-in Dirichlet Laplacian spectrum")


def project(f: GridFunction, s: Spectrum) -> SpectralCoeffs:
    """Inner products ``(f, phi_n)`` by the trapezoid rule, computed with a type-I DST.

    On the interior grid the discrete sines are exactly orthogonal, so any
    ``f`` spanned by the first ``M`` eigenfunctions is recovered exactly.
    """
    _require_dirichlet(s)
    m = f.x.size
    if not math.isclose(f.length, s.length, rel_tol=1e-12):
        raise ValueError(f"grid length {f.length} differs from spectrum length {s.length}")
    if not np.allclose(f.x, interior_grid(f.length, m), rtol=1e-12, atol=0.0):
        raise ValueError("projection needs the uniform interior grid i*L/(M+1)")
    if s.n_modes > m:
        raise ValueError(f"{m} grid points cannot resolve {s.n_modes} modes")
    if m < 2 * s.n_modes:
        warnings.warn(
            f"{m} grid points for {s.n_modes} modes; coefficients may be aliased",
            AliasingWarning,
            stacklevel=2,
        )
    # dst type 1 gives 2 * sum_i f_i sin(k pi i / (M+1))
    raw = dst(f.values, type=1)
    coeffs = f.spacing * math.sqrt(2.0 / f.length) * 0.5 * raw[: s.n_modes]
    return SpectralCoeffs(coeffs, s.multiplicities)


def evaluate(c: SpectralCoeffs, s: Spectrum, grid) -> GridFunction:
    """Synthesis ``sum_n c_n phi_n(x)``.

    ``grid`` is either an integer ``M`` (the interior grid) or an array of
    points in ``[0, L]``.
    """
    _require_dirichlet(s)
    c.check(s)
    length = float(s.length)
    if np.ndim(grid) == 0:
        x = interior_grid(length, int(grid))
    else:
        x = np.asarray(grid, dtype=float)
        if np.any(x < 0) or np.any(x > length):
            raise ValueError("evaluation points must lie in [0, L]")
    n = np.arange(1, s.n_modes + 1)
    basis = math.sqrt(2.0 / length) * np.sin(np.outer(x, n) * (math.pi / length))
    return GridFunction(x, basis @ c.values, length)


def norm_l2(c: SpectralCoeffs) -> float:
    # hypot scales internally: no overflow or underflow from squaring
    return math.hypot(*c.values)


def norm_h2(c: SpectralCoeffs, s: Spectrum) -> float:
    """``sqrt(sum mu_n^2 c_nj^2)``, the graph norm of the operator."""
    c.check(s)
    return math.hypot(*(s.expanded() * c.values))
