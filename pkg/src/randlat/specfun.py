"""Self-contained special functions backing the closed-form evaluators.

Integer-order Bessel J (ascending series merged with a normalized backward
Miller recurrence), the Airy function Ai (Maclaurin core plus asymptotic
wings), the conical Legendre function P_{-1/2+is}(eta), and the moment
polynomials phi_n.  Nothing here imports scipy; the test suite checks these
routines against independent oracles instead.
"""

from __future__ import annotations

import math

import numpy as np

from .quadrature import panel_nodes

# ---------------------------------------------------------------------------
# Bessel J of integer order

_SERIES_CUTOFF = 12.0


def _bessel_series(n: int, x: float) -> float:
    # ascending Maclaurin series, adequate for |x| <= 12 at any order
    half = 0.5 * x
    try:
        term = half**n / math.factorial(n)
    except OverflowError:
        return 0.0
    if term == 0.0:
        # far under the underflow floor for large n and small x
        return 0.0
    total = term
    m = 1
    while True:
        term *= -(half * half) / (m * (n + m))
        total += term
        if abs(term) <= 1e-18 * max(abs(total), 1e-300):
            return total
        m += 1


def _bessel_miller(x: float, nmax: int) -> np.ndarray:
    """All of J_0(x)..J_nmax(x) by backward recurrence, x > 0.

    Normalized with J_0 + 2 sum_m J_{2m} = 1, which fixes the overall scale
    to machine accuracy once the downward sweep starts far enough above
    max(nmax, x).
    """
    start = int(max(nmax, x) + 40 + 12.0 * x ** (1.0 / 3.0))
    if start % 2 == 1:
        start += 1
    vals = np.zeros(nmax + 1)
    jp = 0.0
    jc = 1e-300
    norm = 0.0
    for m in range(start, 0, -1):
        jm = (2.0 * m / x) * jc - jp
        jp, jc = jc, jm
        if abs(jc) > 1e250:
            jp *= 1e-250
            jc *= 1e-250
            vals *= 1e-250
            norm *= 1e-250
        idx = m - 1
        if idx <= nmax:
            vals[idx] = jc
        if idx % 2 == 0:
            norm += 2.0 * jc if idx > 0 else jc
    return vals / norm


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind at integer order n."""
    n = int(n)
    sign = 1.0
    if x < 0.0:
        x = -x
        if n % 2:
            sign = -sign
    if n < 0:
        n = -n
        if n % 2:
            sign = -sign
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x <= _SERIES_CUTOFF:
        return sign * _bessel_series(n, x)
    return sign * float(_bessel_miller(x, n)[n])


def bessel_j_orders(x: float, nmax: int) -> np.ndarray:
    """J_0(x)..J_nmax(x) in one sweep (x >= 0)."""
    if x < 0.0:
        raise ValueError("bessel_j_orders expects x >= 0")
    if x == 0.0:
        out = np.zeros(nmax + 1)
        out[0] = 1.0
        return out
    if x <= _SERIES_CUTOFF:
        return np.array([_bessel_series(n, x) for n in range(nmax + 1)])
    return _bessel_miller(x, nmax)


# ---------------------------------------------------------------------------
# Airy Ai

_AI0 = 0.3550280538878172392600632  # Ai(0)  = 3^(-2/3)/Gamma(2/3)
_AIP0 = -0.2588194037928067984051836  # Ai'(0) = -3^(-1/3)/Gamma(1/3)
_AIRY_SPLIT = 7.0


def _airy_maclaurin(x: float) -> float:
    # Ai = Ai(0) f(x) + Ai'(0) g(x), f and g the standard type-1/2 solutions
    f_term, f_sum = 1.0, 1.0
    g_term, g_sum = x, x
    x3 = x * x * x
    k = 0
    while True:
        f_term *= x3 / ((3 * k + 2) * (3 * k + 3))
        g_term *= x3 / ((3 * k + 3) * (3 * k + 4))
        f_sum += f_term
        g_sum += g_term
        if abs(f_term) < 1e-18 and abs(g_term) < 1e-18 and k > 3:
            break
        k += 1
    return _AI0 * f_sum + _AIP0 * g_sum


def _airy_u_coeffs(zeta: float, nmax: int = 40) -> list[float]:
    # u_k / zeta^k of the Poincare expansion, truncated at the smallest term
    out = [1.0]
    u = 1.0
    for k in range(nmax):
        u *= (3 * k + 0.5) * (3 * k + 1.5) * (3 * k + 2.5) / (54.0 * (k + 1) * (k + 0.5))
        t = u / zeta ** (k + 1)
        if abs(t) > abs(out[-1]):
            break
        out.append(t)
        if abs(t) < 1e-19:
            break
    return out


def _airy_asym_pos(x: float) -> float:
    zeta = (2.0 / 3.0) * x ** 1.5
    terms = _airy_u_coeffs(zeta)
    s = sum((-1) ** k * t for k, t in enumerate(terms))
    return math.exp(-zeta) * s / (2.0 * math.sqrt(math.pi) * x**0.25)


def _airy_asym_neg(x: float) -> float:
    # x > 0 here, evaluating Ai(-x)
    zeta = (2.0 / 3.0) * x ** 1.5
    terms = _airy_u_coeffs(zeta)
    even = sum((-1) ** k * t for k, t in enumerate(terms[0::2]))
    odd = sum((-1) ** k * t for k, t in enumerate(terms[1::2]))
    phase = zeta - math.pi / 4.0
    return (math.cos(phase) * even + math.sin(phase) * odd) / (math.sqrt(math.pi) * x**0.25)


def airy_ai(x: float) -> float:
    """Airy function Ai(x)."""
    if abs(x) <= _AIRY_SPLIT:
        return _airy_maclaurin(x)
    if x > 0.0:
        if x > 108.0:
            return 0.0  # below the double-precision underflow of exp(-zeta)
        return _airy_asym_pos(x)
    return _airy_asym_neg(-x)


# ---------------------------------------------------------------------------
# Conical Legendre function P_{-1/2+is}(eta), eta >= 1, s >= 0

def legendre_conical_grid(s: np.ndarray, eta: float, *, per_cycle: float = 0.8) -> np.ndarray:
    """P_{-1/2+is}(eta) for an array of s at fixed eta.

    Uses the finite-interval cosine form (2/pi) int_0^xi cos(s t)
    (2 cosh xi - 2 cosh t)^(-1/2) dt with xi = arccosh(eta); the
    substitution t = xi - u^2 removes the endpoint square-root singularity.
    This form has no exponentially large prefactor, so it stays accurate
    up to s ~ 50 and eta ~ 1e6 and beyond.
    """
    s = np.asarray(s, dtype=float)
    if eta < 1.0:
        raise ValueError(f"eta must be >= 1, got {eta}")
    if eta == 1.0:
        return np.ones_like(s)
    xi = math.acosh(eta)
    smax = float(np.max(s)) if s.size else 0.0
    # oscillation frequency in u is 2 s u <= 2 s sqrt(xi); order-16 panels
    # hold quadrature error near 1e-14 with under one panel per cycle
    cycles = smax * xi / (2.0 * math.pi) + 1.0
    n_panels = int(math.ceil(max(16.0, cycles * per_cycle)))
    u, w = panel_nodes(0.0, math.sqrt(xi), n_panels)
    t = xi - u * u
    g = 2.0 * u / np.sqrt(2.0 * math.cosh(xi) - 2.0 * np.cosh(t))
    wg = w * g
    return (2.0 / math.pi) * (np.cos(np.outer(s, t)) @ wg)


def legendre_conical(s: float, eta: float) -> float:
    """Conical Legendre function of the first kind, P_{-1/2+is}(eta)."""
    if s < 0.0:
        raise ValueError("s must be >= 0")
    return float(legendre_conical_grid(np.array([s]), eta)[0])


# ---------------------------------------------------------------------------
# Moment polynomials phi_n

def phi_n(n: int, s):
    """phi_1 = 1, phi_n(s) = prod_{j<n} (s^2+(j-1/2)^2)/j^2, in log space."""
    if n < 1:
        raise ValueError("n must be >= 1")
    s = np.asarray(s, dtype=float)
    if n == 1:
        out = np.ones_like(s)
        return float(out) if out.ndim == 0 else out
    j = np.arange(1, n)
    logs = np.log(s[..., None] ** 2 + (j - 0.5) ** 2) - 2.0 * np.log(j)
    out = np.exp(logs.sum(axis=-1))
    return float(out) if out.ndim == 0 else out


def phi_table(nmax: int, s: np.ndarray) -> np.ndarray:
    """Rows phi_1..phi_nmax on a common s grid, built by the one-step ratio."""
    s = np.asarray(s, dtype=float)
    out = np.empty((nmax, s.size))
    out[0] = 1.0
    logs = np.zeros(s.size)
    for n in range(1, nmax):
        logs += np.log(s * s + (n - 0.5) ** 2) - 2.0 * math.log(n)
        out[n] = np.exp(logs)
    return out
