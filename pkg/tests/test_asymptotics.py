import math

import numpy as np
import pytest

from randlat.asymptotics import (FieldQuery, bulk_terms, front_attenuation,
                                 mean_bulk, mean_front, sample_transmitted_bulk,
                                 unperturbed_bulk, unperturbed_front)
from randlat.core import LatticeConfig, front_params
from randlat.specfun import airy_ai, bessel_j
from randlat.timedomain import sample_ensemble, snap_time
from randlat.transtats import gamma_iid


def q_of(x, alpha, ks=0.0):
    return FieldQuery(x=x, alpha=alpha, config=LatticeConfig(pinning=ks, section_length=1))


def test_bulk_matches_bessel_closed_form():
    # relative error vs J_{2x}(2 alpha x) at x = 2000
    x = 2000
    for alpha in (1.5, 2.0, 3.0):
        asy = unperturbed_bulk(q_of(x, alpha)).value
        ref = bessel_j(2 * x, 2.0 * alpha * x)
        assert abs(asy - ref) / abs(ref) <= 0.02


def test_bulk_prefactor_decays_with_alpha():
    x = 500
    amps = [bulk_terms(q_of(x, a))[0].amplitude for a in (1.5, 2.5, 4.0, 8.0)]
    assert all(b < a for a, b in zip(amps, amps[1:]))


def test_bulk_below_resolution_flag():
    est = unperturbed_bulk(q_of(100, 1.0 + 0j.real, ks=1.1))  # alpha < alpha_s
    assert est.value == 0.0 and est.below_resolution


def test_bulk_near_caustic_flag():
    ks = 1.1
    alpha_s = front_params(ks).alpha_s
    est = unperturbed_bulk(q_of(100, alpha_s + 5e-4, ks=ks))
    assert est.near_caustic


def test_pinned_bulk_matches_simulation():
    # two-branch form vs direct integration at x = 600, alpha = 2.5
    ks, x, alpha = 1.1, 600, 2.5
    cfg = LatticeConfig(pinning=ks, section_length=1)
    dt = 5e-3
    t = snap_time(alpha * x, dt)
    table = sample_ensemble(cfg, np.zeros((1, 1)), 0, t, dt,
                            int(math.ceil(t)) + 10, [(x, t)])
    sim = float(table[0, 0])
    asy = unperturbed_bulk(q_of(x, t / x, ks=ks)).value
    assert abs(asy - sim) / abs(sim) <= 0.05


def test_front_values_and_decay():
    x = 1000
    assert unperturbed_front(x, 0.0, 0.0) == pytest.approx(
        airy_ai(0.0) / x ** (1.0 / 3.0), rel=1e-12)
    assert abs(unperturbed_front(x, -3.0, 0.0)) <= 1e-3 * x ** (-1.0 / 3.0)


def test_front_matches_bessel_near_front():
    # J_{2x}(2t) at t = x + beta x^(1/3) vs the Airy form, within 10%
    x = 1000
    croot = x ** (1.0 / 3.0)
    for beta in (-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0):
        ref = bessel_j(2 * x, 2.0 * (x + beta * croot))
        asy = unperturbed_front(x, beta, 0.0)
        scale = max(abs(ref), airy_ai(0.0) / croot)  # front envelope scale
        assert abs(asy - ref) <= 0.10 * scale


def test_expansion_matching_in_overlap():
    # bulk and front forms agree within 5% for 1 << beta << x^(2/3)
    x = 10**6
    for beta in (5.0, 6.5, 8.0):
        alpha = 1.0 + beta * x ** (-2.0 / 3.0)
        bulk = unperturbed_bulk(q_of(x, alpha)).value
        front = unperturbed_front(x, beta, 0.0)
        envelope = 1.0 / (math.sqrt(math.pi * x) * (alpha**2 - 1.0) ** 0.25)
        assert abs(bulk - front) <= 0.05 * envelope


def test_mean_reduces_to_unperturbed_at_sigma0():
    q = q_of(300, 1.7)
    assert mean_bulk(q, 0.0, 16).value == unperturbed_bulk(q).value
    q2 = q_of(300, 2.1, ks=1.1)
    assert mean_bulk(q2, 0.0, 16).value == unperturbed_bulk(q2).value
    assert mean_front(300, 0.4, 0.0, 16, 1.1) == unperturbed_front(300, 0.4, 1.1)


def test_mean_bulk_damping_exponent_ks0():
    # the damping exponent is sigma^2 (alpha^2 - 1) L exactly
    x, alpha, sigma = 400, 1.8, 0.15
    q = q_of(x, alpha)
    for L in (8, 16, 32):
        ratio = mean_bulk(q, sigma, L).value / unperturbed_bulk(q).value
        assert math.log(ratio) == pytest.approx(-sigma**2 * (alpha**2 - 1.0) * L,
                                                rel=1e-10)


def test_mean_front_ks0_free_of_disorder():
    for sigma in (0.0, 0.1, 0.2):
        assert mean_front(500, 0.7, sigma, 16, 0.0) == unperturbed_front(500, 0.7, 0.0)


def test_mean_front_attenuation_closed_form():
    ks, sigma, L = 1.1, 0.15, 8
    expect = math.exp(-sigma**2 * math.sqrt(ks) * math.sqrt(4.0 + ks)
                      / (math.sqrt(4.0 + ks) - math.sqrt(ks)) ** 2 * L)
    assert front_attenuation(sigma, L, ks) == pytest.approx(expect, rel=1e-12)
    assert front_attenuation(sigma, L, 0.0) == 1.0
    # attenuation vanishes continuously as the pinning is released
    assert front_attenuation(sigma, L, 1e-9) == pytest.approx(1.0, abs=1e-4)


def test_gamma_single_source_of_truth():
    # the damping entering mean_bulk equals gamma_iid at the stationary
    # frequency to machine precision
    ks, sigma, L = 1.1, 0.12, 8
    q = q_of(500, 2.2, ks=ks)
    terms = bulk_terms(q)
    expect = sum(math.exp(-gamma_iid(t.omega, sigma, ks) * L) * t.value
                 for t in terms)
    assert mean_bulk(q, sigma, L).value == pytest.approx(expect, abs=1e-15)


def test_mean_bulk_monotone_in_L():
    q = q_of(400, 2.0)
    vals = [abs(mean_bulk(q, 0.15, L).value) for L in (4, 8, 16, 32)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_sample_transmitted_identities(rng):
    q = q_of(300, 1.9)
    sigma, L = 0.1, 16
    assert sample_transmitted_bulk(q, 0.0, L, 0.0).value == pytest.approx(
        unperturbed_bulk(q).value, rel=1e-14)
    # fixed w shifts the phase only: sweeping w through a full phase cycle
    # recovers the damped amplitude as the envelope
    term = bulk_terms(q)[0]
    gamma = gamma_iid(term.omega, sigma, 0.0)
    cycle = 2.0 * math.pi / math.sqrt(gamma)
    vals = [abs(sample_transmitted_bulk(q, sigma, L, w).value)
            for w in np.linspace(0.0, cycle, 400)]
    assert max(vals) == pytest.approx(
        term.amplitude * math.exp(-gamma * L / 2.0), rel=1e-4)


def test_sample_average_reproduces_mean_bulk():
    # E_w[cos(phi + sqrt(gamma) w)] = e^{-gamma L/2} cos(phi) via
    # Gauss-Hermite quadrature over w ~ N(0, L)
    q = q_of(350, 2.3)
    sigma, L = 0.12, 16
    nodes, weights = np.polynomial.hermite_e.hermegauss(80)
    scale = math.sqrt(L)
    avg = sum(wt * sample_transmitted_bulk(q, sigma, L, float(scale * z)).value
              for z, wt in zip(nodes, weights)) / math.sqrt(2.0 * math.pi)
    assert avg == pytest.approx(mean_bulk(q, sigma, L).value, abs=1e-12)


def test_observer_must_clear_the_section():
    with pytest.raises(ValueError):
        mean_bulk(q_of(10, 2.0), 0.1, 16)
    with pytest.raises(ValueError):
        mean_front(10, 0.0, 0.1, 16, 0.0)
    with pytest.raises(ValueError):
        sample_transmitted_bulk(q_of(10, 2.0), 0.1, 16, 0.0)
    with pytest.raises(ValueError):
        sample_transmitted_bulk(q_of(100, 2.0, ks=1.0), 0.1, 16, 0.0)
