from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import load_json
from fdw_backward.contour_bound import eta_upper_bound
from fdw_backward.errors import NoZeroFoundError
from fdw_backward.psi_zero import (
    NearTangencyWarning,
    find_zeros,
    psi,
    psi_leading_constant,
    psi_many,
    scan_grid,
)

CENSUS_ALPHAS = [1.1, 1.2, 1.5, 1.8]


@pytest.mark.parametrize("alpha", [1.01, 1.2, 1.5, 1.8, 1.99])
def test_psi_at_zero(alpha):
    assert abs(psi(alpha, 0.0) - 1.0) <= 1e-12


def test_leading_constant_closed_form():
    assert psi_leading_constant(1.5) == pytest.approx(-1 / (2 * math.pi), rel=1e-14)
    assert psi_leading_constant(1.5) == pytest.approx(-0.15915494309, abs=1e-11)


@given(st.floats(1.001, 1.999))
def test_leading_constant_negative(alpha):
    assert psi_leading_constant(alpha) < 0


@pytest.mark.parametrize("alpha", [1.2, 1.5, 1.8])
def test_leading_constant_is_the_limit(alpha):
    C = psi_leading_constant(alpha)
    f = [e * e * psi(alpha, e) for e in (1e4, 1e5, 1e6)]
    assert abs(f[1] / C - 1) <= 1e-3
    # Aitken extrapolation does not presume the order of the correction
    d1, d2 = f[1] - f[0], f[2] - f[1]
    limit = f[2] - d2 * d2 / (d2 - d1)
    assert abs(limit / C - 1) <= 1e-7


def test_psi_from_oracle_triple(ml_rows):
    vals = {}
    for r in ml_rows:
        if r["alpha"] == 1.5 and r["eta"] == 1.0:
            vals[r["beta"]] = float(r["value"])
    expected = vals[1.0] ** 2 + vals[2.0] * vals[1.5]
    assert psi(1.5, 1.0) == pytest.approx(expected, rel=1e-12)


def test_psi_rejects_negative_eta():
    with pytest.raises(ValueError):
        psi(1.5, -1.0)
    with pytest.raises(ValueError):
        psi(2.0, 1.0)


def test_psi_many_order_independent():
    etas = np.geomspace(0.1, 1e4, 97)
    perm = np.random.default_rng(3).permutation(etas.size)
    assert np.array_equal(psi_many(1.5, etas)[perm], psi_many(1.5, etas[perm]))


def test_scan_grid_layout():
    g = scan_grid(1e4, 4096)
    assert g.size == 4096 + 2048
    assert g[0] == 0.0 and g[-1] == pytest.approx(1e4)
    assert np.all(np.diff(g) > 0)
    assert scan_grid(30.0, 100).size == 100


@pytest.mark.parametrize("alpha", CENSUS_ALPHAS)
def test_zero_set_matches_census(alpha, zeros, zero_census):
    census = zero_census[alpha]
    zs = zeros(alpha)
    assert census["negative_beyond_last_zero"]
    assert len(zs) == census["count"]
    for z, ref in zip(zs.zeros, census["zeros"]):
        assert ref["lo"] <= z.eta <= ref["hi"]


@pytest.mark.parametrize("alpha", CENSUS_ALPHAS)
def test_zero_set_invariants(alpha, zeros):
    zs = zeros(alpha)
    etas = zs.etas
    assert np.all(np.diff(etas) > 0)
    assert etas[0] > 0
    assert zs.search_ceiling == eta_upper_bound(alpha)
    for z in zs.zeros:
        lo, hi = z.bracket
        assert lo < hi <= lo + zs.bracket_tol * hi
        assert psi(alpha, lo) * psi(alpha, hi) < 0
        assert z.residual <= 1e-10
        assert hi < zs.search_ceiling


@pytest.mark.parametrize("alpha", CENSUS_ALPHAS)
def test_psi_positive_before_first_zero(alpha, zeros):
    first = zeros(alpha).etas[0]
    assert np.all(psi_many(alpha, np.linspace(0.0, first * (1 - 1e-9), 400)) > 0)


@pytest.mark.parametrize("alpha", CENSUS_ALPHAS)
def test_psi_negative_at_ceiling(alpha, zeros):
    assert psi(alpha, zeros(alpha).search_ceiling) < 0


@pytest.mark.parametrize("alpha", [1.2, 1.5, 1.8])
def test_count_stable_under_grid_doubling(alpha, zeros, doubled_zeros):
    coarse, fine = zeros(alpha), doubled_zeros(alpha)
    assert len(coarse) == len(fine)
    assert np.allclose(coarse.etas, fine.etas, rtol=1e-11)


def test_hidden_zero_pair_is_recovered():
    # on this coarse grid the pair near eta ~ 55-68 produces no sign change,
    # only a grid maximum that stays below zero
    ceiling = eta_upper_bound(1.5)
    values = psi_many(1.5, scan_grid(ceiling, 51))
    sign = np.sign(values)
    assert np.sum(sign[:-1] * sign[1:] < 0) == 3
    zs = find_zeros(1.5, grid_points=51)
    assert len(zs) == 5
    assert np.allclose(zs.etas, find_zeros(1.5, ceiling=100.0).etas, rtol=1e-11)


def test_no_zero_below_small_ceiling():
    with pytest.raises(NoZeroFoundError):
        find_zeros(1.5, ceiling=5.0)


def test_ceiling_override_and_tolerance():
    zs = find_zeros(1.5, ceiling=20.0, bracket_tol=1e-8)
    assert len(zs) == 2
    for z in zs.zeros:
        assert z.bracket[1] - z.bracket[0] <= 1e-8 * z.bracket[1]


def test_default_scan_raises_no_tangency_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error", NearTangencyWarning)
        zs = find_zeros(1.2)
    assert zs.near_tangencies == ()


def test_to_dict_is_plain(zeros):
    d = zeros(1.2).to_dict()
    assert d["alpha"] == 1.2
    assert isinstance(d["zeros"][0]["eta"], float)
    assert d["zeros"][0]["index"] == 1


def test_census_file_is_independent_scan():
    data = load_json("psi_zero_oracle.json")
    assert data["check_error"] < 1e-11
    assert all(row["points"] == 1_000_000 for row in data["census"])
