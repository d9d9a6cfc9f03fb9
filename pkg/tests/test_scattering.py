import cmath
import math

import numpy as np
import pytest

from conftest import brute_force_scattering
from randlat.core import LatticeConfig, band_edges
from randlat.scattering import (BackendMismatchError, SolverSingularError,
                                classify_channel, harmonic_setup,
                                perfect_interface_trans2, reflect_evanescent,
                                solve_matched_recursion, solve_matched_toeplitz,
                                solve_nonmatched, transmission_batch,
                                transmission_kernel_left,
                                transmission_kernel_right)
from randlat.timedomain import MassProfile, uniform_profile


def setup_for(omega, ks, deltas, d0=0.0, d1=0.0):
    cfg = LatticeConfig(pinning=ks, section_length=len(deltas))
    return harmonic_setup(omega, cfg, MassProfile(np.asarray(deltas, float), d0, d1))


def random_matched_instance(rng):
    ks = float(rng.uniform(0.0, 2.0))
    L = int(rng.integers(1, 51))
    sigma = float(rng.uniform(0.0, 0.2))
    lo, hi = band_edges(ks)
    omega = lo + (hi - lo) * float(rng.uniform(0.02, 0.98))
    deltas = rng.uniform(-math.sqrt(3.0) * sigma, math.sqrt(3.0) * sigma, L)
    return omega, ks, deltas


def test_clean_section_is_transparent():
    s = setup_for(1.3, 0.0, np.zeros(25))
    for res in (solve_matched_toeplitz(s), solve_matched_recursion(s)):
        assert res.T == 1.0
        assert res.R == 0.0


def test_single_defect_closed_form(rng):
    for _ in range(10):
        omega, ks = float(rng.uniform(0.5, 1.8)), 0.0
        d1 = float(rng.uniform(-0.3, 0.3))
        s = setup_for(omega, ks, [d1])
        k = s.k
        expect = 1.0 / (1.0 - 1j * omega**2 * d1 / (2.0 * math.sin(k)))
        got = solve_matched_toeplitz(s)
        assert got.T == pytest.approx(expect, abs=1e-13)
        assert solve_matched_recursion(s).T == pytest.approx(expect, abs=1e-13)


def test_dual_backend_equivalence(rng):
    for _ in range(60):
        omega, ks, deltas = random_matched_instance(rng)
        s = setup_for(omega, ks, deltas)
        a = solve_matched_toeplitz(s)
        b = solve_matched_recursion(s)
        assert abs(a.T - b.T) <= 1e-10
        assert abs(a.R - b.R) <= 1e-10
        assert np.abs(a.interior - b.interior).max() <= 1e-9
        assert a.flux_deficit <= 1e-12 and b.flux_deficit <= 1e-12


def test_recursion_stepwise_conservation(rng):
    # |alpha|^2 - |beta|^2 stays 1 along the sweep
    from randlat.scattering import _run_recursion
    omega, ks, deltas = random_matched_instance(rng)
    s = setup_for(omega, ks, deltas)
    a0, b0, logs, coeffs = _run_recursion(s, 1.0 + 0.0j, 0.0j)
    inv = np.abs(coeffs[:, 0]) ** 2 - np.abs(coeffs[:, 1]) ** 2
    assert np.abs(inv - 1.0).max() <= 1e-12
    assert abs(abs(a0) ** 2 - abs(b0) ** 2 - 1.0) <= 1e-12


def test_reciprocity_of_transmittance(rng):
    for _ in range(20):
        omega, ks, deltas = random_matched_instance(rng)
        f = solve_matched_recursion(setup_for(omega, ks, deltas))
        b = solve_matched_recursion(setup_for(omega, ks, deltas[::-1]))
        assert abs(abs(f.T) ** 2 - abs(b.T) ** 2) <= 1e-10


def test_matched_against_brute_force(rng):
    for _ in range(20):
        omega, ks, deltas = random_matched_instance(rng)
        T, R, interior = brute_force_scattering(omega, ks, deltas)
        got = solve_matched_toeplitz(setup_for(omega, ks, deltas))
        assert got.T == pytest.approx(T, abs=1e-11)
        assert got.R == pytest.approx(R, abs=1e-11)
        assert np.abs(got.interior - interior).max() <= 1e-10


def _nonmatched_instance(rng, side):
    ks = float(rng.uniform(0.0, 1.5))
    L = int(rng.integers(1, 51))
    off = float(rng.uniform(0.02, 0.15)) * (1 if rng.uniform() < 0.5 else -1)
    lo, hi = band_edges(ks)
    for _ in range(200):
        omega = lo + (hi - lo) * float(rng.uniform(0.05, 0.95))
        if classify_channel(omega, ks, off).propagative:
            break
    deltas = rng.uniform(-0.1, 0.1, L)
    d0, d1 = (off, 0.0) if side == "left" else (0.0, off)
    return omega, ks, deltas, d0, d1


@pytest.mark.parametrize("side", ["left", "right"])
def test_nonmatched_recursion_vs_kernel_vs_brute(rng, side):
    for _ in range(30):
        omega, ks, deltas, d0, d1 = _nonmatched_instance(rng, side)
        s = setup_for(omega, ks, deltas, d0, d1)
        res = solve_nonmatched(s)  # built-in kernel cross-check active
        T, R, interior = brute_force_scattering(omega, ks, deltas, d0, d1)
        assert res.T == pytest.approx(T, abs=1e-10)
        assert res.R == pytest.approx(R, abs=1e-10)
        assert np.abs(res.interior - interior).max() <= 1e-9
        kernel = (transmission_kernel_left if side == "left"
                  else transmission_kernel_right)(s)
        assert abs(kernel - res.T) <= 1e-10
        assert res.flux_deficit <= 1e-12


def test_nonmatched_general_offsets_against_brute(rng):
    for _ in range(15):
        ks = float(rng.uniform(0.0, 1.0))
        L = int(rng.integers(1, 30))
        d0, d1 = float(rng.uniform(-0.1, 0.1)), float(rng.uniform(-0.1, 0.1))
        lo, hi = band_edges(ks)
        for _ in range(300):
            omega = lo + (hi - lo) * float(rng.uniform(0.1, 0.9))
            if (classify_channel(omega, ks, d0).propagative
                    and classify_channel(omega, ks, d1).propagative):
                break
        deltas = rng.uniform(-0.1, 0.1, L)
        res = solve_nonmatched(setup_for(omega, ks, deltas, d0, d1))
        T, R, _ = brute_force_scattering(omega, ks, deltas, d0, d1)
        assert res.T == pytest.approx(T, abs=1e-10)
        assert res.R == pytest.approx(R, abs=1e-10)


def test_nonmatched_reduces_to_matched():
    omega, ks = 1.1, 0.3
    deltas = np.linspace(-0.05, 0.08, 12)
    a = solve_nonmatched(setup_for(omega, ks, deltas))
    b = solve_matched_recursion(setup_for(omega, ks, deltas))
    assert a.T == pytest.approx(b.T, abs=1e-14)
    assert a.R == pytest.approx(b.R, abs=1e-14)


def test_kernel_degenerates_continuously_to_matched(rng):
    omega, ks, deltas = random_matched_instance(rng)
    matched = solve_matched_toeplitz(setup_for(omega, ks, deltas))
    near = solve_nonmatched(setup_for(omega, ks, deltas, d0=1e-8))
    assert abs(near.T - matched.T) <= 1e-6
    near = solve_nonmatched(setup_for(omega, ks, deltas, d1=1e-8))
    assert abs(near.T - matched.T) <= 1e-6


def test_perfect_interface_closed_form(rng):
    for _ in range(10):
        omega, ks, deltas, d0, d1 = _nonmatched_instance(rng, "left")
        res = solve_nonmatched(setup_for(omega, ks, np.zeros_like(deltas), d0, d1))
        s = setup_for(omega, ks, deltas, d0, d1)
        expect = perfect_interface_trans2(s.left.k, s.right.k)
        assert abs(res.T) ** 2 == pytest.approx(expect, abs=1e-12)


def _evanescent_instance(rng, branch):
    ks = float(rng.uniform(0.3, 1.5))
    lo, hi = band_edges(ks)
    if branch == "cosh":
        d1 = float(rng.uniform(-0.6, -0.3))
        wmax = math.sqrt(ks / (1.0 + d1))
        omega = float(rng.uniform(lo * 1.01, min(wmax * 0.99, hi * 0.99)))
    else:
        d1 = float(rng.uniform(0.35, 0.8))
        wmin = math.sqrt((4.0 + ks) / (1.0 + d1))
        omega = float(rng.uniform(wmin * 1.005, hi * 0.995))
    return omega, ks, d1


@pytest.mark.parametrize("branch", ["cosh", "alt"])
def test_evanescent_total_reflection(rng, branch):
    done = 0
    while done < 10:
        omega, ks, d1 = _evanescent_instance(rng, branch)
        if classify_channel(omega, ks, d1).propagative:
            continue
        s = setup_for(omega, ks, rng.uniform(-0.1, 0.1, 20), 0.0, d1)
        res = reflect_evanescent(s)
        assert abs(abs(res.R) - 1.0) <= 1e-12
        assert res.transmitted_decay > 0.0
        assert res.regime.startswith("evanescent")
        done += 1


def test_evanescent_phase_matches_direct_interface(rng):
    # clean section: R from a two-unknown direct interface solve
    ks, d1 = 1.0, -0.5
    omega = 1.15  # in (1, sqrt(2)): cosh branch
    L = 10
    s = setup_for(omega, ks, np.zeros(L), 0.0, d1)
    res = reflect_evanescent(s)
    k = s.k
    kap = s.right.kappa
    # field: e^{ikx} + R e^{-ikx} for x <= L, Tq e^{-kappa x} beyond; rows at L, L+1
    A = np.array([[cmath.exp(-1j * k * (L + 1)), -math.exp(-kap * (L + 1))],
                  [cmath.exp(-1j * k * L), -math.exp(-kap * L)]], dtype=complex)
    b = -np.array([cmath.exp(1j * k * (L + 1)), cmath.exp(1j * k * L)], dtype=complex)
    Rdir, Tdir = np.linalg.solve(A, b)
    assert res.R == pytest.approx(Rdir, abs=1e-12)
    assert res.T == pytest.approx(Tdir, abs=1e-12)


def test_recursion_renormalization_guard():
    # deep attenuation drives |alpha| past the rescale threshold; T must
    # come back finite and conservation must still hold
    ks = 0.0
    omega = 1.9999
    L = 4000
    rng = np.random.default_rng(0)
    s = setup_for(omega, ks, rng.uniform(-0.35, 0.35, L))
    res = solve_matched_recursion(s)
    assert np.isfinite(res.T.real) and np.isfinite(res.T.imag)
    assert abs(res.T) < 1e-30
    assert abs(res.R) <= 1.0 + 1e-10
    assert res.flux_deficit <= 1e-9


def test_singular_system_reports_condition():
    # exact singularity cannot occur for physical masses (the resonance
    # condition needs a complex defect), so exercise the error path directly
    from randlat.scattering import _solve_kernel
    A = np.array([[1.0, 1.0], [1.0, 1.0]], dtype=complex)
    with pytest.raises(SolverSingularError) as err:
        _solve_kernel(A, np.array([1.0, 0.0], dtype=complex))
    assert err.value.cond > 1e15


def test_batch_matches_scalar(rng):
    ks, L = 0.02, 40
    deltas = rng.uniform(-0.08, 0.08, (6, L))
    for d0, d1 in ((0.0, 0.0), (0.1, 0.0), (0.0, -0.1)):
        T, R = transmission_batch(1.25, ks, deltas, d0, d1)
        for i in range(6):
            s = setup_for(1.25, ks, deltas[i], d0, d1)
            res = solve_nonmatched(s, cross_check=False)
            assert T[i] == pytest.approx(res.T, abs=1e-13)
            assert R[i] == pytest.approx(res.R, abs=1e-13)


def test_backend_mismatch_raises(monkeypatch):
    import randlat.scattering as sc
    s = setup_for(1.2, 0.0, np.full(8, 0.05), d0=0.1)
    monkeypatch.setattr(sc, "transmission_kernel_left", lambda _s: 123.0 + 0j)
    with pytest.raises(BackendMismatchError):
        sc.solve_nonmatched(s)
