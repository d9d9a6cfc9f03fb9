"""Physical parameters and dispersion geometry of the pinned mono-atomic chain.

The chain carries unit masses outside a disordered section, a substrate
pinning constant Ks >= 0, and supports traveling waves on the frequency
band (sqrt(Ks), sqrt(Ks+4)).  Everything downstream (time-domain solvers,
scattering, asymptotics, transmission statistics) pulls the wavenumber
k(w), its derivatives, the spectral amplitude c(w) and the stationary
frequencies from here, so the closed forms live in exactly one place.

Conventions: w is the angular frequency, k(w) = 2 asin(sqrt(w^2-Ks)/2) is
the in-band wavenumber in (0, pi), and the group slowness is k'(w).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class BandEdgeError(ValueError):
    """Frequency outside the open propagative band; `edge` names the side."""

    def __init__(self, omega: float, ks: float, edge: str):
        self.omega = omega
        self.ks = ks
        self.edge = edge
        super().__init__(
            f"omega={omega!r} is outside the open band "
            f"({math.sqrt(ks)!r}, {math.sqrt(ks + 4.0)!r}): {edge} edge"
        )


class NoStationaryPointError(ValueError):
    """Observation slowness at or below the minimal slowness alpha_s."""


@dataclass(frozen=True)
class LatticeConfig:
    """Physical scenario: pinning, disordered-section size, disorder strength,
    and the mass offsets of the two unperturbed half-spaces."""

    pinning: float = 0.0          # Ks >= 0
    section_length: int = 1       # L >= 1 sites carrying random mass defects
    disorder_sigma: float = 0.0   # std dev of the mass perturbations
    left_offset: float = 0.0      # constant mass perturbation for x <= 0
    right_offset: float = 0.0     # constant mass perturbation for x > L

    def __post_init__(self):
        if self.pinning < 0.0:
            raise ValueError(f"pinning must be >= 0, got {self.pinning}")
        if self.section_length < 1:
            raise ValueError(f"section_length must be >= 1, got {self.section_length}")
        if self.disorder_sigma < 0.0:
            raise ValueError(f"disorder_sigma must be >= 0, got {self.disorder_sigma}")
        for name in ("left_offset", "right_offset"):
            if 1.0 + getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must keep the half-space mass positive")

    @property
    def band(self) -> tuple[float, float]:
        return band_edges(self.pinning)


@dataclass(frozen=True)
class DispersionPoint:
    """Wavenumber and its first three derivatives at one in-band frequency."""

    omega: float
    k: float
    k1: float   # dk/dw  (group slowness, > 0 in band)
    k2: float   # d2k/dw2 (vanishes at w_s)
    k3: float   # d3k/dw3


@dataclass(frozen=True)
class FrontParams:
    """Frequency and slowness of the ballistic front (inflection of k)."""

    omega_s: float
    alpha_s: float


def band_edges(ks: float) -> tuple[float, float]:
    return math.sqrt(ks), math.sqrt(ks + 4.0)


def in_band(omega: float, ks: float) -> bool:
    lo, hi = band_edges(ks)
    return lo < abs(omega) < hi


def wavenumber(omega: float, ks: float) -> float:
    """k(w) on the closed band, hitting 0 and pi at the edges exactly.

    Frequencies within a few ulp of an edge take the limit value, since the
    arcsin form cannot do better than sqrt(ulp) there.
    """
    lo, hi = band_edges(ks)
    w = abs(omega)
    if w < lo or w > hi:
        raise BandEdgeError(omega, ks, "lower" if w < lo else "upper")
    eps = 8.0 * 2.2e-16 * (4.0 + ks)
    if w * w - ks <= eps:
        return 0.0
    if (4.0 + ks) - w * w <= eps:
        return math.pi
    return 2.0 * math.asin(math.sqrt(w * w - ks) / 2.0)


def _require_open_band(omega: float, ks: float) -> None:
    lo, hi = band_edges(ks)
    if not lo < abs(omega):
        raise BandEdgeError(omega, ks, "lower")
    if not abs(omega) < hi:
        raise BandEdgeError(omega, ks, "upper")


def dispersion(omega: float, ks: float) -> DispersionPoint:
    """Dispersion data at a frequency strictly inside the open band.

    The derivatives use closed forms, so the dispersion residual
    -w^2 - (2 cos k - 2 - Ks) stays at the 1e-12 level everywhere the
    divergence at the edges allows.
    """
    _require_open_band(omega, ks)
    w = abs(omega)
    a = w * w - ks               # > 0 in band
    b = 4.0 + ks - w * w         # > 0 in band
    k = 2.0 * math.asin(math.sqrt(a) / 2.0)
    sa, sb = math.sqrt(a), math.sqrt(b)
    k1 = 2.0 * w / (sa * sb)
    ws4 = ks * (4.0 + ks)        # omega_s^4
    k2 = 2.0 * (w**4 - ws4) / (a * sa * b * sb)
    k3 = 2.0 * w * (4.0 * w * w * a * b + 3.0 * (w**4 - ws4) * (2.0 * w * w - 4.0 - 2.0 * ks)) \
        / ((a * b) ** 2 * sa * sb)
    return DispersionPoint(omega=w, k=k, k1=k1, k2=k2, k3=k3)


def spectral_amplitude(omega: float, ks: float) -> float:
    """Impulse spectral weight c(w); zero outside the band, +inf at a
    divergent edge.  For Ks = 0 the lower edge is regular with c(0) = 1."""
    lo, hi = band_edges(ks)
    w = abs(omega)
    if ks == 0.0:
        if w >= hi:
            return math.inf if w == hi else 0.0
        return 2.0 / math.sqrt(4.0 - w * w)
    if w <= lo or w >= hi:
        if w == lo or w == hi:
            return math.inf
        return 0.0
    return 2.0 * w / (math.sqrt(w * w - ks) * math.sqrt(4.0 + ks - w * w))


def front_params(ks: float) -> FrontParams:
    """Front frequency w_s = (4Ks+Ks^2)^(1/4) and slowness alpha_s >= 1."""
    if ks < 0.0:
        raise ValueError("ks must be >= 0")
    if ks == 0.0:
        return FrontParams(omega_s=0.0, alpha_s=1.0)
    ws2 = math.sqrt(ks * (4.0 + ks))
    omega_s = math.sqrt(ws2)
    alpha_s = math.sqrt(2.0) / math.sqrt(2.0 + ks - ws2)
    return FrontParams(omega_s=omega_s, alpha_s=alpha_s)


def stationary_frequencies(alpha: float, ks: float) -> tuple[float | None, float]:
    """Band frequencies whose group slowness k'(w) equals alpha.

    Returns (w_minus, w_plus).  For Ks = 0 the slow branch degenerates into
    the band edge, so w_minus is None and the single stationary frequency
    2 sqrt(alpha^2-1)/alpha sits in the plus slot.
    """
    fp = front_params(ks)
    if alpha <= fp.alpha_s:
        raise NoStationaryPointError(
            f"alpha={alpha!r} must exceed alpha_s={fp.alpha_s!r} for Ks={ks!r}"
        )
    if ks == 0.0:
        return None, 2.0 * math.sqrt(alpha * alpha - 1.0) / alpha
    a2 = alpha * alpha
    disc = math.sqrt(max(a2 * a2 - (2.0 + ks) * a2 + 1.0, 0.0))
    base = (1.0 + ks / 2.0) * a2 - 1.0
    w_plus = math.sqrt(2.0 * (base + disc)) / alpha
    w_minus = math.sqrt(2.0 * (base - disc)) / alpha
    return w_minus, w_plus
