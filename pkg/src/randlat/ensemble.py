"""Disorder generation and deterministic Monte Carlo campaigns.

Every realization is a pure function of (master_seed, index) through a
counter-based Philox stream, so campaigns are embarrassingly parallel and
bitwise reproducible at any worker count: results are gathered by index
and reduced in fixed order.

Marginals are zero-mean unit-variance shapes scaled by sigma (bounded
uniform by default, symmetric two-point, or a 3-sigma truncated Gaussian
rescaled to exact unit variance).  Correlated disorder filters the i.i.d.
stream through a finite moving average obtained by spectral factorization
of the target autocovariance, with weights normalized to preserve sigma^2
exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .timedomain import MassProfile
from .transtats import CorrelationModel

# 3-sigma truncation leaves variance v = 1 - 2 B phi(B)/(2 Phi(B) - 1)
_TRUNC_B = 3.0
_TRUNC_SCALE = 1.0 / math.sqrt(
    1.0 - 2.0 * _TRUNC_B * math.exp(-_TRUNC_B**2 / 2.0) / math.sqrt(2.0 * math.pi)
    / (2.0 * 0.9986501019683699 - 1.0)
)

_UNIT_BOUND = {
    "uniform": math.sqrt(3.0),
    "two_point": 1.0,
    "truncated_gaussian": _TRUNC_B * _TRUNC_SCALE,
}


def _ma_weights(model: CorrelationModel) -> np.ndarray:
    """Moving-average weights whose autocorrelation matches the model on its
    (possibly truncated) support, normalized to sum of squares one."""
    lags = model.lags(1e-8)
    J = lags.size - 1
    if J == 0:
        return np.array([1.0])
    # spectral factorization of the Laurent polynomial sum Gamma(|j|) z^j
    poly = np.concatenate([lags[::-1], lags[1:]])      # powers z^0 .. z^{2J}
    roots = np.roots(poly[::-1])
    inside = roots[np.abs(roots) < 1.0]
    if inside.size != J:
        raise ValueError("correlation spectrum is not strictly positive")
    w = np.real(np.poly(inside))
    w = w / math.sqrt(float(np.dot(w, w)))
    check = np.correlate(w, w, mode="full")[w.size - 1:]
    if np.max(np.abs(check[: J + 1] - lags)) > 1e-7:
        raise ValueError("moving-average fit failed to match the covariance")
    return w


@dataclass(frozen=True)
class DisorderSpec:
    """Statistical description of the random mass defects on sites 1..L."""

    sigma: float
    length: int
    distribution: str = "uniform"
    correlation: CorrelationModel = field(default_factory=CorrelationModel.uncorrelated)
    master_seed: int = 0

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ValueError("sigma must be >= 0")
        if self.length < 1:
            raise ValueError("length must be >= 1")
        if self.distribution not in _UNIT_BOUND:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        weights = _ma_weights(self.correlation)
        object.__setattr__(self, "_weights", weights)
        bound = self.sigma * _UNIT_BOUND[self.distribution] * float(np.abs(weights).sum())
        if bound >= 1.0:
            raise ValueError(
                f"sigma={self.sigma} can produce a mass perturbation of "
                f"magnitude {bound:.3f} >= 1 (nonpositive mass)"
            )

    @property
    def weights(self) -> np.ndarray:
        return self._weights


def _stream(master_seed: int, index: int) -> np.random.Generator:
    """Counter-based stream: realization index selects a disjoint counter
    block, so any realization is reachable without fast-forwarding."""
    bitgen = np.random.Philox(key=master_seed & ((1 << 128) - 1),
                              counter=[0, 0, index, 0])
    return np.random.Generator(bitgen)


def _unit_draws(rng: np.random.Generator, distribution: str, n: int) -> np.ndarray:
    if distribution == "uniform":
        return rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), n)
    if distribution == "two_point":
        return rng.integers(0, 2, n).astype(float) * 2.0 - 1.0
    out = np.empty(n)
    have = 0
    while have < n:
        block = rng.standard_normal(max(n - have + 16, 32))
        block = block[np.abs(block) <= _TRUNC_B]
        take = min(block.size, n - have)
        out[have:have + take] = block[:take]
        have += take
    return out * _TRUNC_SCALE


def draw_deltas(spec: DisorderSpec, index: int) -> np.ndarray:
    """Mass perturbations of realization `index`, length spec.length."""
    if index < 0:
        raise ValueError("index must be >= 0")
    rng = _stream(spec.master_seed, index)
    w = spec.weights
    xi = _unit_draws(rng, spec.distribution, spec.length + w.size - 1)
    if w.size == 1:
        return spec.sigma * xi
    return spec.sigma * np.convolve(xi, w, mode="valid")


def draw_profile(spec: DisorderSpec, index: int,
                 left_offset: float = 0.0, right_offset: float = 0.0) -> MassProfile:
    """Deterministic realization as a MassProfile."""
    return MassProfile(draw_deltas(spec, index), left_offset, right_offset)


@dataclass(frozen=True)
class EnsembleSummary:
    """Per-point first and second moments of a Monte Carlo estimate."""

    coords: np.ndarray
    n_real: int
    mean: np.ndarray
    std: np.ndarray
    stderr: np.ndarray

    def to_csv(self, path) -> None:
        """Columns coord,mean,std,stderr,n."""
        with open(path, "w", newline="") as fh:
            fh.write("coord,mean,std,stderr,n\n")
            for i in range(self.coords.size):
                fh.write(",".join([
                    repr(float(self.coords[i])), repr(float(self.mean[i])),
                    repr(float(self.std[i])), repr(float(self.stderr[i])),
                    str(self.n_real),
                ]) + "\n")


def run_campaign(spec: DisorderSpec, solver, n_real: int,
                 coords: np.ndarray | None = None,
                 n_jobs: int = 1) -> EnsembleSummary:
    """Monte Carlo sweep of `solver` over realizations 0..n_real-1.

    `solver(profile)` returns a scalar or a 1-d array (one entry per sweep
    coordinate).  Work may be spread over threads, but results land in an
    index-addressed table and are reduced in index order, so the summary is
    bitwise independent of n_jobs.  A solver failure aborts the campaign
    with the offending realization index.
    """
    if n_real < 2:
        raise ValueError("n_real must be >= 2")
    first = np.atleast_1d(np.asarray(solver(draw_profile(spec, 0)), dtype=float))
    table = np.empty((n_real, first.size))
    table[0] = first

    def work(i: int) -> None:
        try:
            table[i] = np.atleast_1d(np.asarray(solver(draw_profile(spec, i)), dtype=float))
        except Exception as exc:
            raise RuntimeError(f"solver failed on realization {i}") from exc

    indices = range(1, n_real)
    if n_jobs == 1:
        for i in indices:
            work(i)
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            for fut in [pool.submit(work, i) for i in indices]:
                fut.result()

    mean = table.mean(axis=0)
    std = table.std(axis=0, ddof=1)
    if coords is None:
        coords = np.arange(first.size, dtype=float)
    return EnsembleSummary(coords=np.asarray(coords, dtype=float), n_real=n_real,
                           mean=mean, std=std, stderr=std / math.sqrt(n_real))
