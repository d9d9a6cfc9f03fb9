"""Shared test helpers: an independent brute-force scattering oracle.

The oracle assembles the literal lattice difference equations on the
section plus its two interface rows, with plane-wave (or decaying)
radiation closures, and solves the small dense system directly.  It shares
no code path with the production back-ends.
"""

import cmath
import math

import numpy as np
import pytest


def brute_force_scattering(omega, ks, deltas, d0=0.0, d1=0.0):
    """Direct solve for (T, R, interior) with propagative half-spaces."""
    L = len(deltas)
    k0 = math.acos((2.0 + ks - omega * omega * (1.0 + d0)) / 2.0)
    k1 = math.acos((2.0 + ks - omega * omega * (1.0 + d1)) / 2.0)
    n = L + 2
    A = np.zeros((n, n), complex)
    b = np.zeros(n, complex)

    def field_at(x):
        # (unknown index -> coefficient, constant term)
        if x <= 0:
            return {0: cmath.exp(-1j * k0 * x)}, cmath.exp(1j * k0 * x)
        if x > L:
            return {L + 1: cmath.exp(1j * k1 * x)}, 0.0
        return {x: 1.0}, 0.0

    for i, x in enumerate(range(0, L + 2)):
        dd = d0 if x <= 0 else (deltas[x - 1] if x <= L else d1)
        diag = -(2.0 + ks) + omega * omega * (1.0 + dd)
        for site, wgt in ((x - 1, 1.0), (x + 1, 1.0), (x, diag)):
            cmap, const = field_at(site)
            for j, cc in cmap.items():
                A[i, j] += wgt * cc
            b[i] -= wgt * const
    sol = np.linalg.solve(A, b)
    return sol[L + 1], sol[0], sol[1:L + 1]


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
