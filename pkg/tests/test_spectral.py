import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crestfactor.errors import ConfigurationError, DomainError
from crestfactor.spectral import (PeriodicGrid, SpectralField, dealias, hs_norm_sq, norm,
                                  random_band_limited, sobolev_seminorm_sq, spectral_derivative,
                                  to_physical, to_spectral, transform)

from conftest import TWO_PI, field_from, taylor_green


def grid1(N=64, L=TWO_PI):
    return PeriodicGrid(1, L, N)


def test_single_mode_identity():
    g = grid1(16, L=3.0)
    c = np.zeros((1, 16), dtype=complex)
    c[0, 1] = c[0, -1] = 0.5
    x = g.x
    assert np.allclose(to_physical(SpectralField(g, c))[0], np.cos(2 * math.pi * x / 3.0), atol=1e-14)


def test_zero_field_round_trip():
    g = grid1()
    f = to_spectral(g, np.zeros(64))
    assert np.all(f.coeffs == 0) and np.all(to_physical(f) == 0)


def test_size_mismatch_rejected():
    with pytest.raises(ConfigurationError):
        to_spectral(grid1(16), np.zeros(17))


def test_transform_directions():
    g = grid1(8)
    data = np.arange(8.0)
    back = transform(transform(data, "to_spectral", g), "to_physical")
    assert np.allclose(back[0], data, atol=1e-13)
    with pytest.raises(ConfigurationError):
        transform(data, "sideways", g)


@settings(max_examples=40, deadline=None)
@given(d=st.integers(1, 3), seed=st.integers(0, 2**31 - 1), comps=st.integers(1, 3))
def test_round_trip(d, seed, comps):
    N = {1: 64, 2: 32, 3: 12}[d]
    g = PeriodicGrid(d, TWO_PI, N)
    f = random_band_limited(g, np.random.default_rng(seed), components=comps)
    assert np.max(np.abs(to_physical(to_spectral(g, to_physical(f))) - to_physical(f))) < 1e-12


def test_norm_examples():
    g = grid1()
    f = field_from(g, np.cos)
    assert norm(f, 2) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert norm(f, np.inf) == pytest.approx(1.0, rel=1e-14)
    tg = taylor_green()
    assert norm(tg, 2) == pytest.approx(math.pi * math.sqrt(2), rel=1e-13)
    assert norm(tg, np.inf) == pytest.approx(1.0, rel=1e-13)


@settings(max_examples=30, deadline=None)
@given(d=st.integers(1, 3), seed=st.integers(0, 2**31 - 1))
def test_parseval_matches_quadrature(d, seed):
    N = {1: 64, 2: 24, 3: 12}[d]
    g = PeriodicGrid(d, 1.7, N)
    f = random_band_limited(g, np.random.default_rng(seed), components=2, mean_zero=False)
    quad = float(np.sum(to_physical(f) ** 2)) * g.dx**d
    assert norm(f, 2) ** 2 == pytest.approx(quad, rel=1e-10)


def test_seminorm_examples():
    g = grid1()
    assert sobolev_seminorm_sq(field_from(g, lambda x: np.sin(2 * x)), (1,)) == pytest.approx(4 * math.pi)
    g2 = PeriodicGrid(2, TWO_PI, 16)
    f = field_from(g2, lambda x, y: np.sin(x) * np.sin(y))
    assert sobolev_seminorm_sq(f, (1, 1)) == pytest.approx(math.pi**2)
    assert sobolev_seminorm_sq(f, (0, 0)) == pytest.approx(norm(f, 2) ** 2)


def test_hs_norm_examples():
    g = grid1()
    assert hs_norm_sq(field_from(g, np.cos), 0) == pytest.approx(math.pi)
    assert hs_norm_sq(field_from(g, np.cos), 1) == pytest.approx(math.pi)
    assert hs_norm_sq(field_from(g, lambda x: np.cos(2 * x)), 0.5) == pytest.approx(2 * math.pi)
    with pytest.raises(DomainError):
        hs_norm_sq(field_from(g, lambda x: 1 + np.cos(x)), -1)
    assert hs_norm_sq(field_from(g, np.cos), -1) == pytest.approx(math.pi)


def test_derivative_examples():
    g = grid1()
    d1 = spectral_derivative(field_from(g, np.sin), (1,))
    assert np.allclose(to_physical(d1)[0], np.cos(g.x), atol=1e-13)
    d2 = spectral_derivative(field_from(g, lambda x: np.sin(3 * x)), (2,))
    assert np.allclose(to_physical(d2)[0], -9 * np.sin(3 * g.x), atol=1e-12)
    const = spectral_derivative(field_from(g, lambda x: 0 * x + 2.5), (1,))
    assert np.max(np.abs(const.coeffs)) == 0


def test_odd_derivative_drops_nyquist():
    g = grid1(16)
    alt = field_from(g, lambda x: np.cos(8 * x))  # (-1)^j, the Nyquist mode
    assert np.max(np.abs(spectral_derivative(alt, (1,)).coeffs)) == 0


def test_dealias():
    g = grid1(24)
    low = field_from(g, lambda x: np.sin(3 * x) + np.cos(8 * x))
    assert np.allclose(dealias(low).coeffs, low.coeffs, atol=1e-15)
    nyq = field_from(g, lambda x: np.cos(12 * x))
    assert np.max(np.abs(dealias(nyq).coeffs)) < 1e-15
    assert abs(nyq.coeffs[0, 12]) == pytest.approx(1.0)
    f = random_band_limited(g, np.random.default_rng(3), kmax=12)
    assert np.array_equal(dealias(dealias(f)).coeffs, dealias(f).coeffs)


def test_grid_validation():
    with pytest.raises(ConfigurationError):
        PeriodicGrid(4, 1.0, 8)
    with pytest.raises(ConfigurationError):
        PeriodicGrid(1, -1.0, 8)


def test_random_field_is_real_and_band_limited():
    g = PeriodicGrid(2, TWO_PI, 32)
    f = random_band_limited(g, np.random.default_rng(0), kmax=5)
    k = np.sqrt(g.k2)
    assert np.max(np.abs(f.coeffs[0][k > 5])) < 1e-15
    assert abs(f.coeffs[0][0, 0]) < 1e-15
