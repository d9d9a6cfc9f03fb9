"""Leapfrog position-update kernels for the chain equations of motion.

The batched kernel advances many mass realizations at once and gathers the
displacement at preselected (step, site) pairs.  A numba translation is used
when numba is importable; the numpy fallback performs the same arithmetic in
the same order, realization-chunked to stay cache resident.
"""

from __future__ import annotations

import numpy as np

try:  # optional acceleration; results are identical without it
    import numba as _nb
except ImportError:  # pragma: no cover - exercised only where numba is absent
    _nb = None


def _gather_plan(sample_steps: np.ndarray):
    """Group sample indices by time step: sorted unique steps + CSR layout."""
    order = np.argsort(sample_steps, kind="stable")
    steps_sorted = sample_steps[order]
    uniq, starts = np.unique(steps_sorted, return_index=True)
    ptr = np.append(starts, steps_sorted.size)
    return uniq.astype(np.int64), ptr.astype(np.int64), order.astype(np.int64)


def _leapfrog_gather_numpy(u0, inv_mass, coupling, dt, uniq_steps, ptr,
                           sample_order, sample_sites, out):
    n_real, n = u0.shape
    dt2 = dt * dt
    u_prev = u0.copy()
    a = np.empty_like(u0)

    def accel(u):
        a[:, 1:-1] = u[:, :-2]
        a[:, 1:-1] += u[:, 2:]
        a[:, 1:-1] -= coupling * u[:, 1:-1]
        a[:, 0] = u[:, 1] - coupling * u[:, 0]
        a[:, -1] = u[:, -2] - coupling * u[:, -1]
        a *= inv_mass
        return a

    pos = 0
    if pos < uniq_steps.size and uniq_steps[pos] == 0:
        for j in range(ptr[pos], ptr[pos + 1]):
            out[:, sample_order[j]] = u0[:, sample_sites[sample_order[j]]]
        pos += 1
    u_cur = u0 + 0.5 * dt2 * accel(u0)
    step = 1
    last = int(uniq_steps[-1]) if uniq_steps.size else 0
    while step <= last:
        if uniq_steps[pos] == step:
            for j in range(ptr[pos], ptr[pos + 1]):
                out[:, sample_order[j]] = u_cur[:, sample_sites[sample_order[j]]]
            pos += 1
            if pos >= uniq_steps.size:
                break
        nxt = 2.0 * u_cur - u_prev + dt2 * accel(u_cur)
        u_prev, u_cur = u_cur, nxt
        step += 1


if _nb is not None:
    @_nb.njit(parallel=True, cache=True)
    def _leapfrog_gather_numba(u0, inv_mass, coupling, dt, uniq_steps, ptr,
                               sample_order, sample_sites, out):  # pragma: no cover
        n_real, n = u0.shape
        dt2 = dt * dt
        last = uniq_steps[-1]
        for r in _nb.prange(n_real):
            u = u0[r].copy()
            up = u0[r].copy()
            a = np.empty(n)
            pos = 0
            if uniq_steps[pos] == 0:
                for j in range(ptr[pos], ptr[pos + 1]):
                    out[r, sample_order[j]] = u[sample_sites[sample_order[j]]]
                pos += 1
            # bootstrap half step (zero initial velocity)
            a[0] = (u[1] - coupling * u[0]) * inv_mass[r, 0]
            a[n - 1] = (u[n - 2] - coupling * u[n - 1]) * inv_mass[r, n - 1]
            for j in range(1, n - 1):
                a[j] = (u[j - 1] + u[j + 1] - coupling * u[j]) * inv_mass[r, j]
            for j in range(n):
                tmp = u[j] + 0.5 * dt2 * a[j]
                up[j] = u[j]
                u[j] = tmp
            step = 1
            while step <= last:
                if uniq_steps[pos] == step:
                    for j in range(ptr[pos], ptr[pos + 1]):
                        out[r, sample_order[j]] = u[sample_sites[sample_order[j]]]
                    pos += 1
                    if pos >= uniq_steps.size:
                        break
                a[0] = (u[1] - coupling * u[0]) * inv_mass[r, 0]
                a[n - 1] = (u[n - 2] - coupling * u[n - 1]) * inv_mass[r, n - 1]
                for j in range(1, n - 1):
                    a[j] = (u[j - 1] + u[j + 1] - coupling * u[j]) * inv_mass[r, j]
                for j in range(n):
                    tmp = 2.0 * u[j] - up[j] + dt2 * a[j]
                    up[j] = u[j]
                    u[j] = tmp
                step += 1
else:  # pragma: no cover
    _leapfrog_gather_numba = None


def leapfrog_gather(u0: np.ndarray, inv_mass: np.ndarray, coupling: float,
                    dt: float, sample_steps: np.ndarray,
                    sample_sites: np.ndarray) -> np.ndarray:
    """Impulse-start leapfrog for a batch of chains, sampling u at given
    (step, site) pairs.  Returns an (n_real, n_samples) array."""
    if sample_steps.size == 0:
        return np.empty((u0.shape[0], 0))
    uniq, ptr, order = _gather_plan(sample_steps)
    out = np.empty((u0.shape[0], sample_steps.size))
    if _leapfrog_gather_numba is not None:
        _leapfrog_gather_numba(u0, inv_mass, float(coupling), float(dt),
                               uniq, ptr, order, sample_sites.astype(np.int64), out)
    else:
        chunk = max(1, int(2.0e6 // u0.shape[1]))
        for lo in range(0, u0.shape[0], chunk):
            hi = min(lo + chunk, u0.shape[0])
            _leapfrog_gather_numpy(u0[lo:hi], inv_mass[lo:hi], float(coupling),
                                   float(dt), uniq, ptr, order,
                                   sample_sites.astype(np.int64), out[lo:hi])
    return out
