"""Composite Gauss-Legendre quadrature helpers.

All spectral integrals in this package (transmittance moments, conical
Legendre kernels, transmittance density) are smooth-times-oscillatory with
exponentially decaying tails, so fixed-order Gauss-Legendre panels with
tolerance-driven refinement are both fast and predictable.  Panel widths
are chosen from the local oscillation frequency by the callers; the
refinement loop here only guards against an under-resolved choice.
"""

from __future__ import annotations

import numpy as np

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gl_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1], cached per order."""
    rule = _GL_CACHE.get(order)
    if rule is None:
        rule = np.polynomial.legendre.leggauss(order)
        _GL_CACHE[order] = rule
    return rule


def panel_nodes(a: float, b: float, n_panels: int, order: int = 16):
    """Nodes and weights of a composite GL rule with equal panels on [a, b]."""
    x, w = gl_rule(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    mids = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mids[:, None] + half * x[None, :]).ravel()
    weights = np.broadcast_to(half * w, (n_panels, order)).ravel()
    return nodes, weights


def integrate_panels(f, a: float, b: float, n_panels: int, order: int = 16) -> float:
    nodes, weights = panel_nodes(a, b, n_panels, order)
    return float(np.dot(f(nodes), weights))


def integrate_refining(f, a: float, b: float, n_panels: int, *,
                       tol: float = 1e-10, order: int = 16,
                       max_doublings: int = 8) -> float:
    """Integrate f on [a, b], doubling the panel count until stable.

    Convergence is judged on successive composite-rule values; `tol` is
    absolute, suitable for the O(1)-normalized kernels used here.
    """
    prev = integrate_panels(f, a, b, n_panels, order)
    for _ in range(max_doublings):
        n_panels *= 2
        cur = integrate_panels(f, a, b, n_panels, order)
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
    return prev


def integrate_decaying(f, a: float, *, scale: float, tol: float = 1e-10,
                       order: int = 16, rel_floor: float = 1e-16) -> float:
    """Integrate f on [a, inf) when |f| decays at least like exp(-x/scale).

    Marches panel blocks of width `scale` until a block contributes less
    than rel_floor times the accumulated total (and less than tol).
    """
    total = 0.0
    left = a
    width = max(scale, 1e-12)
    for _ in range(400):
        block = integrate_refining(f, left, left + width, 4, tol=tol / 8, order=order)
        total += block
        left += width
        if abs(block) < max(tol, rel_floor * abs(total)):
            break
    return total
