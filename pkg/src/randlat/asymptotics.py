"""Closed-form large-distance evaluators for the impulse response.

Away from the ballistic front the field at t = alpha x is a sum of one
(unpinned) or two (pinned) stationary-phase contributions of size
1/sqrt(x); on the front t ~ alpha_s x the field is an Airy profile of size
x^(-1/3).  With a disordered section between source and observer the mean
field keeps the same shape with each stationary contribution attenuated by
exp(-gamma(w) L), and a single realization keeps the full envelope with an
exp(-gamma L / 2) amplitude and a Gaussian phase shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (LatticeConfig, NoStationaryPointError, dispersion,
                   front_params, stationary_frequencies)
from .specfun import airy_ai
from .transtats import gamma_iid

CAUSTIC_MARGIN = 1e-3


@dataclass(frozen=True)
class FieldQuery:
    """Observation point x >= 1 (offset from the source) at time t = alpha x."""

    x: int
    alpha: float
    config: LatticeConfig = LatticeConfig()

    def __post_init__(self):
        if self.x < 1:
            raise ValueError("x must be >= 1")


@dataclass(frozen=True)
class BulkTerm:
    """One stationary-phase contribution A cos(phase) with its frequency."""

    omega: float
    amplitude: float
    phase: float

    @property
    def value(self) -> float:
        return self.amplitude * math.cos(self.phase)


@dataclass(frozen=True)
class FieldEstimate:
    value: float
    below_resolution: bool = False   # no stationary point, field << x^(-1/2)
    near_caustic: bool = False       # alpha ~ alpha_s, use the front formula


def bulk_terms(q: FieldQuery) -> list[BulkTerm]:
    """Stationary-phase terms of the unperturbed field at (x, t = alpha x)."""
    ks = q.config.pinning
    x = q.x
    alpha = q.alpha
    w_minus, w_plus = stationary_frequencies(alpha, ks)
    if ks == 0.0:
        amp = 1.0 / (math.sqrt(math.pi * x) * (alpha * alpha - 1.0) ** 0.25)
        k = dispersion(w_plus, 0.0).k
        return [BulkTerm(w_plus, amp, math.pi / 4.0 + (k - w_plus * alpha) * x)]
    ws4 = ks * (4.0 + ks)
    terms = []
    for omega, sign in ((w_plus, 1.0), (w_minus, -1.0)):
        k = dispersion(omega, ks).k
        amp = math.sqrt(2.0) * omega ** 1.5 / math.sqrt(
            math.pi * alpha * abs(omega ** 4 - ws4) * x)
        terms.append(BulkTerm(omega, amp, sign * math.pi / 4.0 + (k - omega * alpha) * x))
    return terms


def _bulk_value(q: FieldQuery, attenuations=None) -> FieldEstimate:
    fp = front_params(q.config.pinning)
    try:
        terms = bulk_terms(q)
    except NoStationaryPointError:
        return FieldEstimate(0.0, below_resolution=True)
    near = abs(q.alpha - fp.alpha_s) < CAUSTIC_MARGIN
    if attenuations is None:
        attenuations = [1.0] * len(terms)
    value = sum(a * t.value for a, t in zip(attenuations, terms))
    return FieldEstimate(value, near_caustic=near)


def unperturbed_bulk(q: FieldQuery) -> FieldEstimate:
    """Leading-order clean-chain field at t = alpha x, alpha > alpha_s."""
    return _bulk_value(q)


def mean_bulk(q: FieldQuery, sigma: float, L: int) -> FieldEstimate:
    """Mean field behind a disordered section: each stationary contribution
    is damped by exp(-gamma(w) L) at its own frequency."""
    if q.x <= L:
        raise ValueError("the observer must sit beyond the disordered section")
    fp = front_params(q.config.pinning)
    try:
        terms = bulk_terms(q)
    except NoStationaryPointError:
        return FieldEstimate(0.0, below_resolution=True)
    att = [math.exp(-gamma_iid(t.omega, sigma, q.config.pinning) * L) for t in terms]
    value = sum(a * t.value for a, t in zip(att, terms))
    return FieldEstimate(value, near_caustic=abs(q.alpha - fp.alpha_s) < CAUSTIC_MARGIN)


def unperturbed_front(x: int, beta: float, ks: float) -> float:
    """Front field at t = alpha_s x + beta x^(1/3) for the clean chain."""
    if x < 1:
        raise ValueError("x must be >= 1")
    if ks == 0.0:
        return airy_ai(-2.0 * beta) / x ** (1.0 / 3.0)
    fp = front_params(ks)
    k = dispersion(fp.omega_s, ks).k
    cbrt2 = 2.0 ** (1.0 / 3.0)
    envelope = cbrt2 / x ** (1.0 / 3.0) * airy_ai(-cbrt2 * beta / fp.alpha_s)
    phase = (k - fp.omega_s * fp.alpha_s) * x - fp.omega_s * beta * x ** (1.0 / 3.0)
    return envelope * math.cos(phase)


def front_attenuation(sigma: float, L: int, ks: float) -> float:
    """exp(-gamma(w_s) L); equals 1 for the unpinned chain."""
    if ks == 0.0 or sigma == 0.0:
        return 1.0
    fp = front_params(ks)
    return math.exp(-gamma_iid(fp.omega_s, sigma, ks) * L)


def mean_front(x: int, beta: float, sigma: float, L: int, ks: float) -> float:
    """Mean front field; unattenuated for Ks = 0, damped by the closed-form
    exp(-gamma(w_s) L) for a pinned chain."""
    if x <= L:
        raise ValueError("the observer must sit beyond the disordered section")
    return unperturbed_front(x, beta, ks) * front_attenuation(sigma, L, ks)


def sample_transmitted_bulk(q: FieldQuery, sigma: float, L: int, w: float) -> FieldEstimate:
    """One realization of the transmitted bulk field for the unpinned chain:
    amplitude exp(-gamma L / 2), phase shifted by sqrt(gamma) * w where the
    caller supplies w ~ N(0, L)."""
    if q.config.pinning != 0.0:
        raise ValueError("single-realization form is available for Ks = 0 only")
    if q.x <= L:
        raise ValueError("the observer must sit beyond the disordered section")
    try:
        (term,) = bulk_terms(q)
    except NoStationaryPointError:
        return FieldEstimate(0.0, below_resolution=True)
    gamma = gamma_iid(term.omega, sigma, 0.0)
    value = term.amplitude * math.exp(-gamma * L / 2.0) \
        * math.cos(term.phase + math.sqrt(gamma) * w)
    return FieldEstimate(value)
