import math

import numpy as np
import pytest

from randlat.core import (BandEdgeError, LatticeConfig, NoStationaryPointError,
                          band_edges, dispersion, front_params,
                          spectral_amplitude, stationary_frequencies, wavenumber)


def dispersion_residual(omega, k, ks):
    return abs(-omega * omega - (2.0 * math.cos(k) - 2.0 - ks))


def test_dispersion_round_trip_across_bands(rng):
    for ks in (0.0, 0.02, 0.5, 1.1, 2.0):
        lo, hi = band_edges(ks)
        for w in lo + (hi - lo) * rng.uniform(0.001, 0.999, 200):
            d = dispersion(w, ks)
            assert dispersion_residual(w, d.k, ks) <= 1e-12
            assert d.k1 > 0.0


def test_dispersion_known_points():
    assert dispersion(2.0 - 1e-15, 0.0).k == pytest.approx(math.pi, abs=1e-7)
    assert dispersion(1.0, 0.0).k == pytest.approx(math.pi / 3.0, abs=1e-14)
    d = dispersion(1.6, 1.0)
    assert abs(2.0 * math.cos(d.k) - 2.0 - 1.0 - (-2.56)) <= 1e-12


def test_dispersion_derivatives_match_finite_differences(rng):
    # derivatives come from closed forms; check against central differences
    for ks in (0.0, 0.7, 1.1):
        lo, hi = band_edges(ks)
        for w in lo + (hi - lo) * rng.uniform(0.1, 0.9, 25):
            h = 1e-5 * (hi - lo)
            km, k0, kp = (dispersion(w + s * h, ks).k for s in (-1.0, 0.0, 1.0))
            d = dispersion(w, ks)
            assert d.k1 == pytest.approx((kp - km) / (2.0 * h), rel=1e-7, abs=1e-9)
            assert d.k2 == pytest.approx((kp - 2.0 * k0 + km) / h**2, rel=1e-4, abs=1e-5)
            k1m, k1p = dispersion(w - h, ks).k1, dispersion(w + h, ks).k1
            k1c = d.k1
            fd3 = (dispersion(w + h, ks).k2 - dispersion(w - h, ks).k2) / (2.0 * h)
            assert d.k3 == pytest.approx(fd3, rel=1e-6, abs=1e-7)
            assert d.k1 == pytest.approx(k1c)


def test_group_slowness_identity():
    # k'(w) = w / sin k(w) on the open band
    for ks in (0.0, 1.1):
        lo, hi = band_edges(ks)
        for w in np.linspace(lo + 0.05, hi - 0.05, 40):
            d = dispersion(w, ks)
            assert d.k1 == pytest.approx(w / math.sin(d.k), rel=1e-13)


def test_band_edge_limits():
    for ks in (0.0, 0.3, 1.1):
        lo, hi = band_edges(ks)
        assert wavenumber(lo, ks) == pytest.approx(0.0, abs=1e-10)
        assert wavenumber(hi, ks) == pytest.approx(math.pi, abs=1e-10)


def test_out_of_band_errors_name_the_edge():
    with pytest.raises(BandEdgeError) as err:
        dispersion(0.5, 1.0)
    assert err.value.edge == "lower"
    with pytest.raises(BandEdgeError) as err:
        dispersion(3.0, 1.0)
    assert err.value.edge == "upper"


def test_spectral_amplitude_values():
    assert spectral_amplitude(0.0, 0.0) == 1.0
    assert spectral_amplitude(math.sqrt(2.0), 0.0) == pytest.approx(math.sqrt(2.0), rel=1e-14)
    assert spectral_amplitude(3.0, 1.0) == 0.0
    assert spectral_amplitude(math.sqrt(1.0), 1.0) == math.inf  # band edge diverges
    assert spectral_amplitude(-1.0, 0.0) == spectral_amplitude(1.0, 0.0)


def test_ks0_sin_k_identity():
    # sin k(w) = w sqrt(4 - w^2) / 2 for the unpinned chain
    for w in np.linspace(0.05, 1.95, 30):
        k = wavenumber(w, 0.0)
        assert math.sin(k) == pytest.approx(w * math.sqrt(4.0 - w * w) / 2.0, rel=1e-12)


def test_front_params_unpinned():
    fp = front_params(0.0)
    assert fp.omega_s == 0.0 and fp.alpha_s == 1.0


def test_front_params_closed_form():
    # frozen high-precision values of the closed form at Ks = 1.1
    fp = front_params(1.1)
    assert fp.omega_s == pytest.approx(1.5390074257343278, abs=1e-15)
    assert fp.alpha_s == pytest.approx(1.6535634031486977, abs=1e-15)
    for ks in (0.01, 0.5, 1.1, 3.0):
        fp = front_params(ks)
        assert fp.alpha_s > 1.0
        # slowness consistency: k'(w_s) = alpha_s
        assert dispersion(fp.omega_s, ks).k1 == pytest.approx(fp.alpha_s, abs=1e-9)
        # inflection: k''(w_s) = 0
        assert abs(dispersion(fp.omega_s, ks).k2) <= 1e-9


def test_k2_changes_sign_once_at_front_frequency():
    ks = 0.8
    fp = front_params(ks)
    lo, hi = band_edges(ks)
    grid = np.linspace(lo + 1e-4, hi - 1e-4, 500)
    signs = np.sign([dispersion(w, ks).k2 for w in grid])
    flips = np.nonzero(np.diff(signs))[0]
    assert flips.size == 1
    assert grid[flips[0]] < fp.omega_s < grid[flips[0] + 1]


def _bisect_slowness(alpha, ks, lo, hi):
    # independent root finder for k'(w) = alpha
    f = lambda w: dispersion(w, ks).k1 - alpha
    a, b = lo, hi
    for _ in range(200):
        m = 0.5 * (a + b)
        if f(a) * f(m) <= 0.0:
            b = m
        else:
            a = m
    return 0.5 * (a + b)


def test_stationary_frequencies_unpinned():
    alpha = math.sqrt(2.0)
    w_minus, w_plus = stationary_frequencies(alpha, 0.0)
    assert w_minus is None
    assert w_plus == pytest.approx(math.sqrt(2.0), rel=1e-14)


def test_stationary_frequencies_against_bisection(rng):
    for _ in range(20):
        ks = float(rng.uniform(0.1, 2.0))
        fp = front_params(ks)
        alpha = fp.alpha_s * float(rng.uniform(1.05, 3.0))
        w_minus, w_plus = stationary_frequencies(alpha, ks)
        lo, hi = band_edges(ks)
        assert lo < w_minus < fp.omega_s < w_plus < hi
        assert dispersion(w_plus, ks).k1 == pytest.approx(alpha, abs=1e-9)
        assert dispersion(w_minus, ks).k1 == pytest.approx(alpha, abs=1e-9)
        eps = 1e-9 * (hi - lo)
        assert w_plus == pytest.approx(
            _bisect_slowness(alpha, ks, fp.omega_s + eps, hi - eps), abs=1e-9)
        assert w_minus == pytest.approx(
            _bisect_slowness(alpha, ks, lo + eps, fp.omega_s - eps), abs=1e-9)


def test_stationary_degenerate_pair_approaches_front():
    ks = 1.1
    fp = front_params(ks)
    w_minus, w_plus = stationary_frequencies(fp.alpha_s * (1.0 + 1e-10), ks)
    assert w_minus == pytest.approx(fp.omega_s, abs=1e-4)
    assert w_plus == pytest.approx(fp.omega_s, abs=1e-4)


def test_no_stationary_point_below_alpha_s():
    with pytest.raises(NoStationaryPointError):
        stationary_frequencies(1.0, 0.0)
    with pytest.raises(NoStationaryPointError):
        stationary_frequencies(1.2, 1.1)  # alpha_s(1.1) ~ 1.65


def test_lattice_config_validation():
    with pytest.raises(ValueError):
        LatticeConfig(pinning=-0.1, section_length=5)
    with pytest.raises(ValueError):
        LatticeConfig(section_length=0)
    with pytest.raises(ValueError):
        LatticeConfig(section_length=5, left_offset=-1.0)
    cfg = LatticeConfig(pinning=1.0, section_length=5)
    assert cfg.band == band_edges(1.0)
