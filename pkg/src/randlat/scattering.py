"""Exact time-harmonic scattering through the disordered section.

Two independent back-ends compute the complex transmission/reflection
coefficients of the section sites 1..L: a dense Green's-function linear
solve (Toeplitz kernel when the half-spaces match the section, interface
kernels when exactly one half-space mass is offset) and a two-term
right-to-left transfer recursion that is exact for any combination of
offsets.  Their agreement to 1e-10 is the module's central invariant.

Sign conventions: unit right-going input from the left, fields
e^{i k0 x} + R e^{-i k0 x} for x <= 0 and T e^{i k1 x} for x > L, with all
wavenumbers the unique roots in (0, pi) of 2 cos k_j = 2 + Ks - w^2 (1+D_j).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import LatticeConfig, band_edges
from .timedomain import MassProfile


class SolverSingularError(RuntimeError):
    """Linear system singular to machine precision (resonance)."""

    def __init__(self, cond: float):
        self.cond = cond
        super().__init__(f"scattering linear system is singular (cond ~ {cond:.3e})")


class BackendMismatchError(RuntimeError):
    """The two exact back-ends disagree beyond tolerance."""


@dataclass(frozen=True)
class Channel:
    """Half-space wave character at one frequency."""

    kind: str            # "propagative" | "evanescent_cosh" | "evanescent_alt"
    k: float = 0.0       # wavenumber in (0, pi) when propagative
    kappa: float = 0.0   # decay rate, field ~ e^{-kappa x} (cosh branch)
    rho: float = 0.0     # decay ratio in (-1, 0), field ~ rho^x (Q < -1 branch)

    @property
    def propagative(self) -> bool:
        return self.kind == "propagative"


def classify_channel(omega: float, ks: float, offset: float) -> Channel:
    """Channel of a uniform half-space with mass 1+offset."""
    q = (2.0 + ks - omega * omega * (1.0 + offset)) / 2.0
    if -1.0 < q < 1.0:
        return Channel("propagative", k=math.acos(q))
    if q >= 1.0:
        return Channel("evanescent_cosh", kappa=math.acosh(max(q, 1.0)))
    return Channel("evanescent_alt", rho=q + math.sqrt(q * q - 1.0))


@dataclass(frozen=True)
class HarmonicSetup:
    """One frequency, one disorder realization, with all three wavenumbers."""

    omega: float
    ks: float
    profile: MassProfile
    k: float             # in-section wavenumber (section must be propagative)
    left: Channel
    right: Channel

    @property
    def matched(self) -> bool:
        return self.profile.left_offset == 0.0 and self.profile.right_offset == 0.0


def harmonic_setup(omega: float, config: LatticeConfig, profile: MassProfile) -> HarmonicSetup:
    lo, hi = band_edges(config.pinning)
    if not lo < omega < hi:
        raise ValueError(f"omega={omega} outside the section band ({lo}, {hi})")
    section = classify_channel(omega, config.pinning, 0.0)
    left = classify_channel(omega, config.pinning, profile.left_offset)
    right = classify_channel(omega, config.pinning, profile.right_offset)
    return HarmonicSetup(omega=omega, ks=config.pinning, profile=profile,
                         k=section.k, left=left, right=right)


@dataclass(frozen=True)
class ScatteringResult:
    T: complex
    R: complex
    interior: np.ndarray         # total field on sites 1..L
    flux_deficit: float
    regime: str = "propagative"  # right half-space character
    transmitted_decay: float | None = None  # decay rate when evanescent


def _flux_deficit(T: complex, R: complex, k0: float, k1: float) -> float:
    return abs(abs(R) ** 2 + (math.sin(k1) / math.sin(k0)) * abs(T) ** 2 - 1.0)


def _require_propagative(setup: HarmonicSetup, sides: str = "both") -> None:
    if sides in ("both", "left") and not setup.left.propagative:
        raise ValueError("left half-space is evanescent at this frequency")
    if sides in ("both", "right") and not setup.right.propagative:
        raise ValueError("right half-space is evanescent at this frequency")


def _solve_kernel(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        u = np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        raise SolverSingularError(float(np.linalg.cond(A))) from None
    resid = np.linalg.norm(A @ u - b, np.inf) / max(np.linalg.norm(b, np.inf), 1e-300)
    if resid > 1e-6:
        raise SolverSingularError(float(np.linalg.cond(A)))
    return u


# ---------------------------------------------------------------------------
# Matched half-spaces: Toeplitz Green's kernel

def solve_matched_toeplitz(setup: HarmonicSetup) -> ScatteringResult:
    """Dense solve with the free-chain kernel C(k) z^{|p-q|}, C = 1/(2i sin k)."""
    if not setup.matched:
        raise ValueError("toeplitz back-end requires matched half-spaces")
    k = setup.k
    w2 = setup.omega ** 2
    deltas = setup.profile.deltas
    L = deltas.size
    C = 1.0 / (2j * math.sin(k))
    z = cmath.exp(1j * k)
    q = np.arange(1, L + 1)
    kernel = C * z ** np.abs(q[:, None] - q[None, :])
    d = -w2 * deltas
    A = np.eye(L, dtype=complex) - kernel * d[None, :]
    incident = z ** q
    v = _solve_kernel(A, incident)          # total field on sites 1..L
    dv = d * v
    T = 1.0 + C * np.dot(z ** (-q.astype(float)), dv)
    R = C * np.dot(z ** q, dv)
    return ScatteringResult(T=complex(T), R=complex(R), interior=v,
                            flux_deficit=_flux_deficit(T, R, k, k))


# ---------------------------------------------------------------------------
# Transfer recursion (any offsets)

_RESCALE = 1e100


def _run_recursion(setup: HarmonicSetup, a: complex, b: complex):
    """Right-to-left sweep of the two-term recursion from site L to 1.

    Returns (a0, b0, log_scale, interior_coeffs) where interior_coeffs[x-1]
    holds (alpha_x, beta_x) before rescaling by the overall solution factor;
    log_scale tracks joint rescalings applied to avoid overflow.
    """
    k = setup.k
    w2 = setup.omega ** 2
    deltas = setup.profile.deltas
    L = deltas.size
    coeff = w2 / (2.0 * math.sin(k))
    coeffs = np.empty((L, 2), dtype=complex)
    log_scale = 0.0
    for x in range(L, 0, -1):
        coeffs[x - 1, 0] = a
        coeffs[x - 1, 1] = b
        c = coeff * deltas[x - 1]
        e2 = cmath.exp(-2j * k * x)
        a, b = a - 1j * c * (a + b * e2), b + 1j * c * (a / e2 + b)
        mag = abs(a)
        if mag > _RESCALE:
            a /= mag
            b /= mag
            coeffs /= mag
            log_scale += math.log(mag)
    return a, b, log_scale, coeffs


def solve_matched_recursion(setup: HarmonicSetup) -> ScatteringResult:
    """Transfer recursion with terminal data (1, 0); T = 1/a0, R = b0/a0."""
    if not setup.matched:
        raise ValueError("matched recursion requires matched half-spaces")
    k = setup.k
    a0, b0, log_scale, coeffs = _run_recursion(setup, 1.0 + 0.0j, 0.0j)
    T = cmath.exp(-log_scale) / a0
    R = b0 / a0
    x = np.arange(1, setup.profile.deltas.size + 1)
    phase = np.exp(1j * k * x)
    # physical interior = T e^{log_scale} (coeffs...); the scales cancel
    interior = (coeffs[:, 0] * phase + coeffs[:, 1] / phase) / a0
    return ScatteringResult(T=T, R=R, interior=interior,
                            flux_deficit=_flux_deficit(T, R, k, k))


def _terminal_data(setup: HarmonicSetup):
    """Terminal (alpha_L, beta_L) for a unit transmitted amplitude, plus the
    right-going factor g1 with field T g1^x for x > L."""
    k = setup.k
    L = setup.profile.deltas.size
    right = setup.right
    if right.propagative:
        g1 = cmath.exp(1j * right.k)
    elif right.kind == "evanescent_cosh":
        g1 = math.exp(-right.kappa)
    else:
        g1 = right.rho
    zk = cmath.exp(1j * k)
    denom = 2j * math.sin(k)
    aL = g1 ** L * zk ** (-L) * (g1 - 1.0 / zk) / denom
    bL = -(g1 ** L) * zk ** L * (g1 - zk) / denom
    return aL, bL, g1


def solve_nonmatched(setup: HarmonicSetup, cross_check: bool = True) -> ScatteringResult:
    """General offsets via the transfer recursion.

    When exactly one offset is nonzero (and everything is propagative) the
    matching interface-kernel solve is also evaluated and must agree with
    the recursion to 1e-10; disagreement raises BackendMismatchError.
    """
    _require_propagative(setup)
    k = setup.k
    k0, k1 = setup.left.k, setup.right.k
    aL, bL, _ = _terminal_data(setup)
    a0, b0, log_scale, coeffs = _run_recursion(setup, aL, bL)
    A = cmath.exp(1j * k0) - cmath.exp(-1j * k)
    B = cmath.exp(1j * k0) - cmath.exp(1j * k)
    denom = A.conjugate() * a0 + B.conjugate() * b0
    R = -(B * a0 + A * b0) / denom
    T = -2j * math.sin(k0) * cmath.exp(-log_scale) / denom
    x = np.arange(1, setup.profile.deltas.size + 1)
    phase = np.exp(1j * k * x)
    interior = -2j * math.sin(k0) * (coeffs[:, 0] * phase + coeffs[:, 1] / phase) / denom
    result = ScatteringResult(T=T, R=R, interior=interior,
                              flux_deficit=_flux_deficit(T, R, k0, k1))
    if cross_check:
        other = None
        if setup.profile.left_offset != 0.0 and setup.profile.right_offset == 0.0:
            other = transmission_kernel_left(setup)
        elif setup.profile.left_offset == 0.0 and setup.profile.right_offset != 0.0:
            other = transmission_kernel_right(setup)
        if other is not None and abs(other - T) > 1e-10 * max(1.0, abs(T)):
            raise BackendMismatchError(
                f"kernel T={other!r} vs recursion T={T!r} differ beyond 1e-10"
            )
    return result


def reflect_evanescent(setup: HarmonicSetup) -> ScatteringResult:
    """Right half-space out of band: total reflection, |R| = 1.

    The transmitted tail T g1^x is reported together with its decay rate
    -log|g1|.
    """
    _require_propagative(setup, sides="left")
    if setup.right.propagative:
        raise ValueError("right half-space is propagative; use solve_nonmatched")
    k0 = setup.left.k
    aL, bL, g1 = _terminal_data(setup)
    a0, b0, log_scale, coeffs = _run_recursion(setup, aL, bL)
    A = cmath.exp(1j * k0) - cmath.exp(-1j * setup.k)
    B = cmath.exp(1j * k0) - cmath.exp(1j * setup.k)
    denom = A.conjugate() * a0 + B.conjugate() * b0
    R = -(B * a0 + A * b0) / denom
    T = -2j * math.sin(k0) * cmath.exp(-log_scale) / denom
    x = np.arange(1, setup.profile.deltas.size + 1)
    phase = np.exp(1j * setup.k * x)
    interior = -2j * math.sin(k0) * (coeffs[:, 0] * phase + coeffs[:, 1] / phase) / denom
    decay = setup.right.kappa if setup.right.kind == "evanescent_cosh" \
        else -math.log(abs(setup.right.rho))
    return ScatteringResult(T=T, R=R, interior=interior,
                            flux_deficit=abs(abs(R) - 1.0),
                            regime=setup.right.kind, transmitted_decay=decay)


# ---------------------------------------------------------------------------
# Interface Green's kernels (one offset zero), used as the independent
# cross-check of the recursion.  The kernel is the background Green's
# function of a clean interface: the free Toeplitz part C z^{|p-q|} plus the
# interface echo, and the source is the background field of the unit input.
# Incident amplitude is normalized in the physical incoming medium, which
# fixes the phase convention to match the recursion back-end.

def transmission_kernel_left(setup: HarmonicSetup) -> complex:
    """T for left offset only (right half-space matched to the section)."""
    _require_propagative(setup)
    if setup.profile.right_offset != 0.0:
        raise ValueError("left kernel requires a matched right half-space")
    k, k0 = setup.k, setup.left.k
    w2 = setup.omega ** 2
    deltas = setup.profile.deltas
    L = deltas.size
    C = 1.0 / (2j * math.sin(k))
    z = cmath.exp(1j * k)
    zk0 = cmath.exp(1j * k0)
    # interface seen from inside the section: e^{-ikx} -> r0 e^{ikx},
    # and the background transmission of the unit input, t0 e^{ikx}
    r0 = (1.0 / zk0 - 1.0 / z) / (z - 1.0 / zk0)
    t0 = 2j * math.sin(k0) / (z - 1.0 / zk0)
    q = np.arange(1, L + 1)
    G = C * (z ** np.abs(q[:, None] - q[None, :]) + r0 * z ** (q[:, None] + q[None, :]))
    d = -w2 * deltas
    A = np.eye(L, dtype=complex) - G * d[None, :]
    ustar = _solve_kernel(A, t0 * z ** q)
    dv = d * ustar
    return complex(t0 + C * np.dot(z ** (-q.astype(float)) + r0 * z ** q, dv))


def transmission_kernel_right(setup: HarmonicSetup) -> complex:
    """T for right offset only (left half-space matched to the section)."""
    _require_propagative(setup)
    if setup.profile.left_offset != 0.0:
        raise ValueError("right kernel requires a matched left half-space")
    k, k1 = setup.k, setup.right.k
    w2 = setup.omega ** 2
    deltas = setup.profile.deltas
    L = deltas.size
    C = 1.0 / (2j * math.sin(k))
    z = cmath.exp(1j * k)
    zk1 = cmath.exp(1j * k1)
    # interface between sites L and L+1: e^{ikx} -> r1 e^{-ikx} inside,
    # tau1 e^{ik1 x} outside
    r1 = z ** (2 * L) * (z - zk1) / (zk1 - 1.0 / z)
    tau1 = 2j * math.sin(k) * (z / zk1) ** L / (zk1 - 1.0 / z)
    q = np.arange(1, L + 1)
    G = C * (z ** np.abs(q[:, None] - q[None, :])
             + r1 * z ** (-(q[:, None] + q[None, :]).astype(float)))
    d = -w2 * deltas
    A = np.eye(L, dtype=complex) - G * d[None, :]
    ustar = _solve_kernel(A, z ** q + r1 * z ** (-q.astype(float)))
    dv = d * ustar
    return complex(tau1 * (1.0 + C * np.dot(z ** (-q.astype(float)), dv)))


def perfect_interface_trans2(k0: float, k1: float) -> float:
    """|T|^2 of a clean interface between propagative media k0 -> k1."""
    return (1.0 - math.cos(2.0 * k0)) / (1.0 - math.cos(k0 + k1))


# ---------------------------------------------------------------------------
# Vectorized recursion over disorder realizations (campaign fast path)

def transmission_batch(omega: float, ks: float, delta_batch: np.ndarray,
                       left_offset: float = 0.0, right_offset: float = 0.0):
    """T and R for a batch of realizations at one frequency.

    All three regions must be propagative.  Returns complex arrays
    (T, R) of length n_real; exact recursion, no diffusion approximation.
    """
    delta_batch = np.asarray(delta_batch, dtype=float)
    n_real, L = delta_batch.shape
    section = classify_channel(omega, ks, 0.0)
    left = classify_channel(omega, ks, left_offset)
    right = classify_channel(omega, ks, right_offset)
    if not (section.propagative and left.propagative and right.propagative):
        raise ValueError("all regions must be propagative for the batch solver")
    k, k0, k1 = section.k, left.k, right.k
    matched = left_offset == 0.0 and right_offset == 0.0
    zk = cmath.exp(1j * k)
    g1 = cmath.exp(1j * k1)
    denom = 2j * math.sin(k)
    if matched:
        a = np.ones(n_real, dtype=complex)
        b = np.zeros(n_real, dtype=complex)
    else:
        a = np.full(n_real, g1 ** L * zk ** (-L) * (g1 - 1.0 / zk) / denom)
        b = np.full(n_real, -(g1 ** L) * zk ** L * (g1 - zk) / denom)
    coeff = omega * omega / (2.0 * math.sin(k))
    for x in range(L, 0, -1):
        c = coeff * delta_batch[:, x - 1]
        e2 = cmath.exp(-2j * k * x)
        an = a - 1j * c * (a + b * e2)
        bn = b + 1j * c * (a / e2 + b)
        a, b = an, bn
    if matched:
        return 1.0 / a, b / a
    A = cmath.exp(1j * k0) - cmath.exp(-1j * k)
    B = cmath.exp(1j * k0) - cmath.exp(1j * k)
    den = A.conjugate() * a + B.conjugate() * b
    R = -(B * a + A * b) / den
    T = -2j * math.sin(k0) / den
    return T, R


def batch_to_csv(path, omega: np.ndarray, T: np.ndarray, R: np.ndarray,
                 flux_deficit: np.ndarray, seed: int, realization: np.ndarray) -> None:
    """Columns omega,re_T,im_T,re_R,im_R,trans2,flux_deficit,seed,realization."""
    with open(path, "w", newline="") as fh:
        fh.write("omega,re_T,im_T,re_R,im_R,trans2,flux_deficit,seed,realization\n")
        for i in range(len(omega)):
            t, r = complex(T[i]), complex(R[i])
            fh.write(",".join([
                repr(float(omega[i])), repr(t.real), repr(t.imag),
                repr(r.real), repr(r.imag), repr(abs(t) ** 2),
                repr(float(flux_deficit[i])), str(int(seed)), str(int(realization[i])),
            ]) + "\n")
