from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fdw_backward.spectral_model import (
    AliasingWarning,
    GridFunction,
    SpectralCoeffs,
    Spectrum,
    SpectrumKind,
    dirichlet_laplacian_1d,
    evaluate,
    interior_grid,
    norm_h2,
    norm_l2,
    project,
    user_spectrum,
)


def test_laplacian_examples():
    assert np.allclose(dirichlet_laplacian_1d(math.pi, 3).eigenvalues, [1, 4, 9], rtol=1e-15)
    s = dirichlet_laplacian_1d(1.0, 1)
    assert s.eigenvalues[0] == pytest.approx(math.pi**2, rel=1e-15)
    assert s.kind is SpectrumKind.DIRICHLET_LAPLACIAN_1D


@given(st.floats(0.1, 50.0), st.integers(1, 200))
def test_laplacian_strictly_increasing(length, n):
    s = dirichlet_laplacian_1d(length, n)
    assert np.all(np.diff(s.eigenvalues) > 0)
    assert np.all(s.multiplicities == 1)
    assert s.size == n


@pytest.mark.parametrize(
    "eig,mult",
    [([], []), ([1.0, 1.0], [1, 1]), ([2.0, 1.0], [1, 1]), ([-1.0, 2.0], [1, 1]), ([1.0, 2.0], [1, 0]), ([1.0], [1, 1])],
)
def test_spectrum_validation(eig, mult):
    with pytest.raises(ValueError):
        Spectrum(eig, mult)


def test_spectrum_is_immutable_value():
    s = user_spectrum([1.0, 3.0], [2, 1])
    with pytest.raises(ValueError):
        s.eigenvalues[0] = 5.0
    assert s == user_spectrum([1.0, 3.0], [2, 1])
    assert s.size == 3
    assert list(s.mode_of_slot()) == [1, 1, 2]
    assert list(s.expanded()) == [1.0, 1.0, 3.0]


def test_coeff_layout_checks():
    s = user_spectrum([1.0, 3.0], [2, 1])
    with pytest.raises(ValueError):
        SpectralCoeffs.for_spectrum(s, [1.0, 2.0])
    c = SpectralCoeffs.for_spectrum(s, [1.0, 2.0, 3.0])
    assert [list(v) for v in c.per_mode()] == [[1.0, 2.0], [3.0]]
    other = dirichlet_laplacian_1d(1.0, 3)
    with pytest.raises(ValueError):
        norm_h2(SpectralCoeffs.for_spectrum(other, [1, 2, 3]) * 1.0, user_spectrum([1.0, 2.0]))


def test_projection_of_second_eigenfunction():
    L = 2.0
    s = dirichlet_laplacian_1d(L, 6)
    f = GridFunction.sample(lambda x: math.sqrt(2 / L) * np.sin(2 * math.pi * x / L), L, 64)
    c = project(f, s)
    expected = np.zeros(6)
    expected[1] = 1.0
    assert np.allclose(c.values, expected, atol=1e-10)


def test_first_unit_synthesises_first_eigenfunction():
    L = 3.0
    s = dirichlet_laplacian_1d(L, 5)
    x = np.linspace(0, L, 31)
    g = evaluate(SpectralCoeffs.unit(s, 0), s, x)
    assert np.allclose(g.values, math.sqrt(2 / L) * np.sin(math.pi * x / L), atol=1e-15)


@given(st.integers(0, 2**32 - 1), st.integers(1, 24))
def test_band_limited_roundtrip_and_parseval(seed, n):
    L = 1.7
    s = dirichlet_laplacian_1d(L, n)
    c = SpectralCoeffs.for_spectrum(s, np.random.default_rng(seed).standard_normal(n))
    f = evaluate(c, s, 2 * n + 3)
    back = project(f, s)
    assert np.max(np.abs(back.values - c.values)) <= 1e-10 * max(1.0, np.max(np.abs(c.values)))
    assert abs(norm_l2(back) ** 2 - f.quadrature_norm_sq()) <= 1e-8 * max(1.0, norm_l2(back) ** 2)
    assert np.allclose(evaluate(back, s, 2 * n + 3).values, f.values, atol=1e-10)


def test_projection_needs_interior_grid_and_enough_points():
    s = dirichlet_laplacian_1d(1.0, 8)
    with pytest.raises(ValueError):
        project(GridFunction(np.linspace(0, 1, 20), np.zeros(20), 1.0), s)
    with pytest.raises(ValueError):
        project(GridFunction.sample(np.sin, 1.0, 5), s)
    with pytest.raises(ValueError):
        project(GridFunction.sample(np.sin, 2.0, 30), s)
    with pytest.raises(ValueError):
        project(GridFunction.sample(np.sin, 1.0, 30), user_spectrum([1.0, 2.0]))


def test_aliasing_warning():
    s = dirichlet_laplacian_1d(1.0, 8)
    with pytest.warns(AliasingWarning):
        project(GridFunction.sample(np.sin, 1.0, 12), s)
    with warnings.catch_warnings():
        warnings.simplefilter("error", AliasingWarning)
        project(GridFunction.sample(np.sin, 1.0, 16), s)


def test_norm_examples():
    s = dirichlet_laplacian_1d(math.pi, 5)
    e1 = SpectralCoeffs.unit(s, 0)
    assert norm_l2(e1) == 1.0 and norm_h2(e1, s) == 1.0
    for n in range(5):
        assert norm_h2(SpectralCoeffs.unit(s, n), s) == pytest.approx(s.eigenvalues[n], rel=1e-15)


@given(st.integers(0, 2**32 - 1), st.floats(-1e3, 1e3))
def test_norm_properties(seed, scale):
    s = user_spectrum([0.5, 2.0, 7.0, 11.0], [1, 3, 1, 2])
    c = SpectralCoeffs.for_spectrum(s, np.random.default_rng(seed).standard_normal(s.size))
    assert norm_h2(c, s) >= s.mu_min * norm_l2(c) * (1 - 1e-15)
    assert norm_l2(scale * c) == pytest.approx(abs(scale) * norm_l2(c), rel=1e-14, abs=1e-300)
    assert norm_h2(c * scale, s) == pytest.approx(abs(scale) * norm_h2(c, s), rel=1e-14, abs=1e-300)


def test_interior_grid():
    x = interior_grid(2.0, 3)
    assert np.allclose(x, [0.5, 1.0, 1.5])
    with pytest.raises(ValueError):
        interior_grid(0.0, 3)
