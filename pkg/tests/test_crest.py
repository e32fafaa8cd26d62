import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crestfactor.crest import (CrestSample, CrestSeries, GniConstants, calibrate_gni,
                               calibration_field, crest,
                               crest_value, gni_ratio, gni_sandwich, kolmogorov_length,
                               length_scale_l, length_scale_lnr)
from crestfactor.errors import DegenerateFieldError, DomainError
from crestfactor.ledger import jn
from crestfactor.spectral import PeriodicGrid, random_band_limited

from conftest import TWO_PI, field_from, taylor_green

LAMBDA_K_1E3 = 0.00562341325190349080  # (1e-9)^(1/4), mpmath


def test_bounded_examples():
    g = PeriodicGrid(1, TWO_PI, 64)
    assert crest(field_from(g, np.sin)).C_f == pytest.approx(math.sqrt(2), rel=1e-13)
    assert crest(taylor_green()).C_f == pytest.approx(math.sqrt(2), rel=1e-13)


def test_variants():
    g = PeriodicGrid(1, TWO_PI, 64)
    u = field_from(g, np.sin)
    unb = crest(u, "unbounded").C_f
    assert unb == pytest.approx(1 / math.sqrt(math.pi))
    forced = crest(u, "forced", F0=jn(u, 0) + 3.0).C_f
    assert forced == pytest.approx(math.sqrt(TWO_PI) / math.sqrt(math.pi + 3.0))
    with pytest.raises(DomainError):
        crest(u, "forced")
    with pytest.raises(DomainError):
        crest(u, "peak")


def test_degenerate_field():
    g = PeriodicGrid(1, TWO_PI, 16)
    with pytest.raises(DegenerateFieldError):
        crest(field_from(g, lambda x: 0 * x))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), scale=st.floats(1e-3, 1e3))
def test_scale_invariance(seed, scale):
    g = PeriodicGrid(2, 3.0, 16)
    u = random_band_limited(g, np.random.default_rng(seed), components=2)
    assert crest(u.scaled(scale)).C_f == pytest.approx(crest(u).C_f, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), d=st.integers(1, 3))
def test_bounded_crest_at_least_one(seed, d):
    N = {1: 32, 2: 16, 3: 8}[d]
    u = random_band_limited(PeriodicGrid(d, 1.3, N), np.random.default_rng(seed))
    assert crest(u).C_f >= 1 - 1e-12


def test_series_csv_round_trip():
    cs = CrestSeries()
    for i in range(4):
        cs.append(CrestSample(0.5 * i, "bounded", 1.0 + i / 3, 2.0, 0.1 * (i + 1)))
    text = io.StringIO()
    cs.write_csv(text)
    assert text.getvalue().splitlines()[0] == "t,variant,sup_norm,denom,C_f"
    back = CrestSeries.read_csv(io.StringIO("# comment\n" + text.getvalue()))
    assert back.samples == cs.samples
    with pytest.raises(DomainError):
        cs.append(CrestSample(0.0, "bounded", 1.0, 1.0, 1.0))
    with pytest.raises(DomainError):
        CrestSeries.read_csv(io.StringIO("a,b\n"))


def test_gni_pure_mode():
    g = PeriodicGrid(1, TWO_PI, 64)
    u = field_from(g, np.sin)
    c = calibrate_gni(1, 1, TWO_PI, 64, samples=500)
    lo, hi = gni_sandwich(u, 1, c)
    assert hi == pytest.approx(c * math.sqrt(TWO_PI))
    assert lo <= crest(u).C_f <= hi
    assert gni_sandwich(u.scaled(7.0), 1, c)[1] == pytest.approx(hi)
    with pytest.raises(DomainError):
        gni_sandwich(taylor_green(), 1, c)


def test_gni_cache(tmp_path):
    consts = GniConstants.load(tmp_path / "gni.json")
    c = consts.get(2, 2, TWO_PI, 16, samples=200)
    again = GniConstants.load(tmp_path / "gni.json")
    assert again.get(2, 2, TWO_PI, 16, calibrate=False) == c


def test_gni_random_fields_2d():
    c = calibrate_gni(2, 2, TWO_PI, 16, samples=300, seed=1)
    rng = np.random.default_rng(99)
    g = PeriodicGrid(2, TWO_PI, 16)
    for _ in range(50):
        u = calibration_field(g, rng)
        lo, hi = gni_sandwich(u, 2, c)
        assert lo <= crest(u).C_f <= hi


def test_length_scale_examples():
    g = PeriodicGrid(2, 3.0, 16)
    k0 = 2
    u = field_from(g, lambda x, y: np.sin(2 * math.pi * k0 * x / 3.0))
    for n in (1, 2, 3):
        assert length_scale_l(jn(u, n), jn(u, 0), n, 2) == pytest.approx(3.0 / (2 * math.pi * k0))
    assert length_scale_l(1.0, 1.0, 2, 2) == pytest.approx(1.0)
    tg = taylor_green()
    assert length_scale_l(jn(tg, 2), jn(tg, 0), 2, 2) == pytest.approx(1 / math.sqrt(2))


def test_lnr_examples():
    tg = taylor_green()
    F = {n: np.full(50, jn(tg, n)) for n in range(3)}
    assert length_scale_lnr(F, 2, 1) == pytest.approx(1 / math.sqrt(2))
    rng = np.random.default_rng(0)
    F = {0: rng.uniform(1, 2, 200), 2: rng.uniform(3, 9, 200)}
    direct = np.cumsum(np.sqrt(F[2] / F[0])) / np.arange(1, 201)
    assert length_scale_lnr(F, 2, 0) ** -2 == pytest.approx(direct[160:].max())
    with pytest.raises(DomainError):
        length_scale_lnr(F, 0, 2)


def test_kolmogorov_length():
    L = 2.0
    eps, lam = kolmogorov_length(1.0, L**3, L, C_K=1.3)
    assert (eps, lam) == pytest.approx((1.0, 1.3))
    eps4, _ = kolmogorov_length(1.0, 4 * L**3, L)
    assert eps4 == pytest.approx(4.0)
    _, lam = kolmogorov_length(1e-3, 1e3, 1.0)  # eps = 1
    assert lam == pytest.approx(LAMBDA_K_1E3, rel=1e-12)
